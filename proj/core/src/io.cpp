#include "signet/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace signet {

namespace {

using nlohmann::json;

/// Line reader that skips blanks and '#' comments and tracks line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      tokens.clear();
      std::istringstream ss(line);
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(fmt::format("line {}: {}", line_no_, what));
  }

  std::size_t line() const { return line_no_; }

  long long integer(const std::string& tok) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      fail(fmt::format("expected an integer, got '{}'", tok));
    }
    return v;
  }

  double real(const std::string& tok) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size()) return v;
    } catch (const std::exception&) {
    }
    fail(fmt::format("expected a number, got '{}'", tok));
  }

  std::size_t index(const std::string& tok, std::size_t n) const {
    const long long v = integer(tok);
    if (v < 0 || static_cast<std::size_t>(v) >= n) {
      fail(fmt::format("node index {} outside [0, {})", v, n));
    }
    return static_cast<std::size_t>(v);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::map<std::string, std::string> parse_header(const LineReader& reader,
                                                const std::vector<std::string>& tokens) {
  std::map<std::string, std::string> out;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) reader.fail(fmt::format("expected key=value, got '{}'", tok));
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return in;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{}", v); }

// ---------------------------------------------------------------------------
// Observations

ObservationSet read_observations(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  if (!reader.next(tokens)) throw DataError("empty observation file");
  const auto header = parse_header(reader, tokens);
  if (!header.count("n") || !header.count("t")) reader.fail("header needs n=<int> and t=<int>");
  const long long n = reader.integer(header.at("n"));
  if (n < 0) reader.fail("negative node count");
  const bool multi = header.count("periods") > 0;
  const long long periods = multi ? reader.integer(header.at("periods")) : 1;
  if (periods < 1) reader.fail("periods must be positive");
  const auto t_tokens = split(header.at("t"), ',');
  if (static_cast<long long>(t_tokens.size()) != periods) {
    reader.fail(fmt::format("expected {} trial counts, got {}", periods, t_tokens.size()));
  }

  std::vector<ObservationMatrix> mats;
  std::vector<std::set<std::size_t>> seen(static_cast<std::size_t>(periods));
  for (const auto& tok : t_tokens) {
    const long long t = reader.integer(tok);
    if (t < 0) reader.fail("negative trial count");
    mats.emplace_back(static_cast<std::size_t>(n), static_cast<int>(t));
  }
  const std::size_t columns = multi ? 4 : 3;
  while (reader.next(tokens)) {
    if (tokens.size() != columns) {
      reader.fail(fmt::format("expected {} fields, got {}", columns, tokens.size()));
    }
    std::size_t s = 0;
    if (multi) s = reader.index(tokens[0], static_cast<std::size_t>(periods));
    const std::size_t off = multi ? 1 : 0;
    const std::size_t i = reader.index(tokens[off], static_cast<std::size_t>(n));
    const std::size_t j = reader.index(tokens[off + 1], static_cast<std::size_t>(n));
    const long long count = reader.integer(tokens[off + 2]);
    if (i == j) reader.fail("self-pair");
    if (count < 0 || count > mats[s].trials()) {
      reader.fail(fmt::format("count {} outside [0, {}]", count, mats[s].trials()));
    }
    if (!seen[s].insert(pair_index(i, j, static_cast<std::size_t>(n))).second) {
      reader.fail(fmt::format("pair ({}, {}) listed twice", i, j));
    }
    mats[s].set(i, j, static_cast<int>(count));
  }
  return ObservationSet(std::move(mats));
}

ObservationSet read_observation_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_observations(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ObservationSet read_observation_files(std::span<const std::filesystem::path> paths) {
  std::vector<ObservationMatrix> all;
  for (const auto& path : paths) {
    const auto set = read_observation_file(path);
    all.insert(all.end(), set.periods().begin(), set.periods().end());
  }
  return ObservationSet(std::move(all));
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
  const bool multi = obs.size() > 1;
  if (multi) {
    std::string ts;
    for (std::size_t s = 0; s < obs.size(); ++s) {
      if (s) ts += ',';
      ts += std::to_string(obs[s].trials());
    }
    out << "n=" << obs.n() << " periods=" << obs.size() << " t=" << ts << '\n';
  } else {
    out << "n=" << obs.n() << " t=" << obs[0].trials() << '\n';
  }
  for (std::size_t s = 0; s < obs.size(); ++s) {
    const auto& x = obs[s];
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.n(); ++i) {
      for (std::size_t j = i + 1; j < x.n(); ++j, ++k) {
        if (x.at_index(k) == 0) continue;
        if (multi) out << s << ' ';
        out << i << ' ' << j << ' ' << x.at_index(k) << '\n';
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Networks, partitions, rates

SignedNetwork read_network(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  if (!reader.next(tokens)) throw DataError("empty network file");
  const auto header = parse_header(reader, tokens);
  if (!header.count("n")) reader.fail("header needs n=<int>");
  const long long n = reader.integer(header.at("n"));
  if (n < 0) reader.fail("negative node count");
  SignedNetwork net(static_cast<std::size_t>(n));
  while (reader.next(tokens)) {
    if (tokens.size() != 3) reader.fail(fmt::format("expected 3 fields, got {}", tokens.size()));
    const std::size_t i = reader.index(tokens[0], net.n());
    const std::size_t j = reader.index(tokens[1], net.n());
    if (i == j) reader.fail("self-pair");
    const long long v = reader.integer(tokens[2]);
    if (v < -1 || v > 1) reader.fail(fmt::format("sign {} not in {{-1, 0, 1}}", v));
    net.set(i, j, sign_from_value(static_cast<int>(v)));
  }
  return net;
}

void write_network(std::ostream& out, const SignedNetwork& net) {
  out << "n=" << net.n() << '\n';
  std::size_t k = 0;
  for (std::size_t i = 0; i < net.n(); ++i) {
    for (std::size_t j = i + 1; j < net.n(); ++j, ++k) {
      if (net.at_index(k) != Sign::absent) {
        out << i << ' ' << j << ' ' << sign_value(net.at_index(k)) << '\n';
      }
    }
  }
}

std::vector<Partition> read_partitions(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  std::map<std::size_t, std::map<std::size_t, int>> by_period;
  std::optional<std::size_t> columns;
  while (reader.next(tokens)) {
    if (!columns) columns = tokens.size();
    if (tokens.size() != *columns || (*columns != 2 && *columns != 3)) {
      reader.fail("expected `i group` or `period i group`");
    }
    const std::size_t off = *columns == 3 ? 1 : 0;
    const long long s = off ? reader.integer(tokens[0]) : 0;
    const long long i = reader.integer(tokens[off]);
    const long long g = reader.integer(tokens[off + 1]);
    if (s < 0 || i < 0 || g < 0) reader.fail("negative value");
    if (!by_period[static_cast<std::size_t>(s)].emplace(static_cast<std::size_t>(i),
                                                         static_cast<int>(g)).second) {
      reader.fail(fmt::format("node {} listed twice", i));
    }
  }
  std::vector<Partition> out;
  std::size_t expected_period = 0;
  for (const auto& [s, nodes] : by_period) {
    if (s != expected_period++) throw DataError("partition periods are not contiguous");
    std::vector<int> labels;
    std::size_t expected_node = 0;
    for (const auto& [i, g] : nodes) {
      if (i != expected_node++) throw DataError(fmt::format("partition misses node {}", i - 1));
      labels.push_back(g);
    }
    out.push_back(Partition::from_labels(labels));
  }
  return out;
}

void write_partitions(std::ostream& out, std::span<const Partition> partitions) {
  const bool multi = partitions.size() > 1;
  for (std::size_t s = 0; s < partitions.size(); ++s) {
    for (std::size_t i = 0; i < partitions[s].size(); ++i) {
      if (multi) out << s << ' ';
      out << i << ' ' << partitions[s].label(i) << '\n';
    }
  }
}

std::vector<RateParams> read_rates(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  if (!reader.next(tokens) || tokens.size() != 5 || tokens[0] != "period") {
    throw DataError("rates file needs header `period p_neg p_zero p_pos q`");
  }
  std::vector<RateParams> out;
  while (reader.next(tokens)) {
    if (tokens.size() != 5) reader.fail("expected 5 fields");
    if (reader.integer(tokens[0]) != static_cast<long long>(out.size())) {
      reader.fail("periods must be listed in order");
    }
    RateParams r{reader.real(tokens[1]), reader.real(tokens[2]), reader.real(tokens[3]),
                 reader.real(tokens[4])};
    out.push_back(r);
  }
  return out;
}

void write_rates(std::ostream& out, std::span<const RateParams> rates) {
  out << "period\tp_neg\tp_zero\tp_pos\tq\n";
  for (std::size_t s = 0; s < rates.size(); ++s) {
    const auto& r = rates[s];
    out << s << '\t' << format_real(r.p_neg) << '\t' << format_real(r.p_zero) << '\t'
        << format_real(r.p_pos) << '\t' << format_real(r.q) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Samples

void write_sample(std::ostream& out, std::size_t draw, const ModelState& state) {
  std::string signs;
  signs.reserve(state.network.pair_total());
  for (Sign s : state.network.upper()) signs.push_back(sign_char(s));
  json periods = json::array();
  for (const auto& p : state.periods) {
    periods.push_back({{"gamma", p.partition.group_count()},
                       {"labels", std::vector<int>(p.partition.labels().begin(),
                                                   p.partition.labels().end())},
                       {"p_neg", p.rates.p_neg},
                       {"p_zero", p.rates.p_zero},
                       {"p_pos", p.rates.p_pos},
                       {"q", p.rates.q}});
  }
  json record = {{"draw", draw},
                 {"log_posterior", state.log_posterior},
                 {"n", state.network.n()},
                 {"signs", signs},
                 {"periods", periods}};
  out << record.dump() << '\n';
}

void write_samples(std::ostream& out, const SampleSet& samples) {
  for (std::size_t k = 0; k < samples.size(); ++k) write_sample(out, k, samples.draws[k]);
}

SampleSet read_samples(std::istream& in) {
  SampleSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      const auto n = record.at("n").get<std::size_t>();
      const auto signs = record.at("signs").get<std::string>();
      if (signs.size() != pair_count(n)) throw DataError("sign string length does not match n");
      ModelState state;
      state.network = SignedNetwork(n);
      for (std::size_t k = 0; k < signs.size(); ++k) {
        state.network.set_at_index(k, sign_from_char(signs[k]));
      }
      state.log_posterior = record.at("log_posterior").get<double>();
      for (const auto& p : record.at("periods")) {
        const auto labels = p.at("labels").get<std::vector<int>>();
        if (labels.size() != n) throw DataError("label vector length does not match n");
        PeriodState ps;
        ps.partition = Partition::from_labels(labels);
        ps.rates = {p.at("p_neg").get<double>(), p.at("p_zero").get<double>(),
                    p.at("p_pos").get<double>(), p.at("q").get<double>()};
        state.periods.push_back(std::move(ps));
      }
      if (!out.draws.empty() && (out.draws.front().network.n() != n ||
                                 out.draws.front().periods.size() != state.periods.size())) {
        throw DataError("draws disagree on node or period count");
      }
      out.draws.push_back(std::move(state));
    } catch (const json::exception& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

SampleSet read_sample_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_samples(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

// ---------------------------------------------------------------------------
// Prediction tables

PredictionTable prediction_table(const EdgeMarginals& m) {
  PredictionTable table;
  table.n = m.n();
  table.rows.reserve(m.values().size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = i + 1; j < m.n(); ++j, ++k) {
      const auto& p = m.at_index(k);
      table.rows.push_back({i, j, p, p[2] - p[0], triple_entropy(p), p[2], p[0]});
    }
  }
  return table;
}

void write_prediction_table(std::ostream& out, const PredictionTable& table) {
  out << "# n=" << table.n << '\n';
  out << "i\tj\tp_neg\tp_zero\tp_pos\tmean\tentropy\tscore_pos\tscore_neg\n";
  for (const auto& r : table.rows) {
    out << r.i << '\t' << r.j << '\t' << format_real(r.probs[0]) << '\t'
        << format_real(r.probs[1]) << '\t' << format_real(r.probs[2]) << '\t'
        << format_real(r.mean) << '\t' << format_real(r.entropy) << '\t'
        << format_real(r.score_pos) << '\t' << format_real(r.score_neg) << '\n';
  }
}

PredictionTable read_prediction_table(std::istream& in) {
  PredictionTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t max_index = 0;
  bool explicit_n = false;
  auto fail = [&](const std::string& what) {
    throw DataError(fmt::format("line {}: {}", line_no, what));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("# n=", 0) == 0) {
      table.n = std::stoul(line.substr(4));
      explicit_n = true;
      continue;
    }
    if (line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (!header_seen) {
      if (tokens.size() != 9 || tokens[0] != "i" || tokens[8] != "score_neg") {
        fail("expected header `i j p_neg p_zero p_pos mean entropy score_pos score_neg`");
      }
      header_seen = true;
      continue;
    }
    if (tokens.size() != 9) fail(fmt::format("expected 9 fields, got {}", tokens.size()));
    PredictionRow r;
    try {
      r.i = std::stoul(tokens[0]);
      r.j = std::stoul(tokens[1]);
      for (std::size_t c = 0; c < 3; ++c) r.probs[c] = std::stod(tokens[2 + c]);
      r.mean = std::stod(tokens[5]);
      r.entropy = std::stod(tokens[6]);
      r.score_pos = std::stod(tokens[7]);
      r.score_neg = std::stod(tokens[8]);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    if (r.i == r.j) fail("self-pair");
    if (r.i > r.j) std::swap(r.i, r.j);
    max_index = std::max(max_index, r.j);
    table.rows.push_back(r);
  }
  if (!header_seen) throw DataError("prediction table has no header");
  if (!explicit_n) table.n = table.rows.empty() ? 0 : max_index + 1;
  if (!table.rows.empty() && max_index >= table.n) throw DataError("pair index exceeds n");
  return table;
}

PairMatrix mean_matrix(const PredictionTable& table) {
  PairMatrix out(table.n);
  for (const auto& r : table.rows) out(r.i, r.j) = r.mean;
  return out;
}

}  // namespace signet
