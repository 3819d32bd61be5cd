#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "command.hpp"
#include "signet/evaluation.hpp"
#include "signet/ingest.hpp"
#include "signet/io.hpp"

namespace signet::app {

namespace {

PredictionTable load_predictions(const fs::path& path) {
  std::ifstream in(path);
  try {
    return read_prediction_table(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::set<std::size_t> read_pair_list(const fs::path& path, std::size_t n) {
  std::ifstream in(path);
  std::string line;
  std::set<std::size_t> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream fields(line);
    std::size_t i = 0, j = 0;
    if (!(fields >> i >> j) || i == j || i >= n || j >= n) {
      throw DataError(fmt::format("{}: line {}: expected two distinct node indices", path.string(), line_no));
    }
    out.insert(pair_index(i, j, n));
  }
  return out;
}

std::vector<bool> read_presence(const fs::path& path, std::size_t n) {
  std::ifstream in(path);
  std::string line;
  std::vector<bool> out(n, false);
  std::size_t line_no = 0, rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream fields(line);
    std::size_t i = 0;
    int present = 0;
    if (!(fields >> i >> present) || i >= n || (present != 0 && present != 1)) {
      throw DataError(fmt::format("{}: line {}: expected `index present`", path.string(), line_no));
    }
    out[i] = present == 1;
    ++rows;
  }
  if (rows != n) throw DataError(fmt::format("{}: expected {} nodes, found {}", path.string(), n, rows));
  return out;
}

int evaluate_auc(Run& r) {
  const auto files = r.inputs("predictions");
  if (files.size() != 1) throw ConfigError("auc mode takes exactly one predictions file");
  const auto table = load_predictions(files.front());
  std::ifstream tin(r.input("truth"));
  const auto truth = read_network(tin);
  if (truth.n() != table.n) throw DataError("predictions and truth have different node counts");
  std::set<std::size_t> excluded;
  if (const auto mask = r.optional_input("exclude")) excluded = read_pair_list(*mask, table.n);

  std::vector<double> pos, neg;
  std::vector<Sign> labels;
  for (const auto& row : table.rows) {
    const auto k = pair_index(row.i, row.j, table.n);
    if (excluded.count(k)) continue;
    pos.push_back(row.score_pos);
    neg.push_back(row.score_neg);
    labels.push_back(truth.at_index(k));
  }
  json results = json::object();
  r.write("auc.tsv", [&](std::ostream& o) {
    o << "class\tauc\tpositives\tpairs\n";
    for (const Sign target : {Sign::positive, Sign::negative}) {
      auto is_target = std::make_unique<bool[]>(labels.size());
      std::size_t count = 0;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        is_target[k] = labels[k] == target;
        count += is_target[k];
      }
      const std::string name = target == Sign::positive ? "positive" : "negative";
      const auto& scores = target == Sign::positive ? pos : neg;
      std::string value = "nan";
      if (count > 0 && count < labels.size()) {
        const double a = eval::auc(scores, std::span<const bool>(is_target.get(), labels.size()));
        value = format_real(a);
        results[name] = a;
      }
      o << fmt::format("{}\t{}\t{}\t{}\n", name, value, count, labels.size());
    }
  });
  r.details()["auc"] = results;
  r.finish();
  for (const auto& [name, a] : results.items()) r.log() << fmt::format("auc {} {}\n", name, a.get<double>());
  return 0;
}

int evaluate_ppc(Run& r) {
  const auto obs = read_observation_files(r.inputs("obs"));
  SampleSet pooled;
  for (const auto& p : r.inputs("samples")) {
    auto s = read_sample_file(p);
    pooled.draws.insert(pooled.draws.end(), s.draws.begin(), s.draws.end());
  }
  const auto seed = r.get<std::uint64_t>("seed");
  r.add_seed(seed);
  Rng rng(seed);
  const auto result = eval::posterior_predictive(obs, pooled, rng, r.workers());
  r.write("ppc.tsv", [&](std::ostream& o) {
    o << "period\tp_value\tdraws\n";
    for (std::size_t s = 0; s < result.periods.size(); ++s) {
      o << fmt::format("{}\t{}\t{}\n", s, format_real(result.periods[s].p_value),
                       result.periods[s].observed.size());
    }
  });
  r.write("ppc_draws.tsv", [&](std::ostream& o) {
    o << "period\tdraw\tobserved\treplicated\n";
    for (std::size_t s = 0; s < result.periods.size(); ++s) {
      const auto& p = result.periods[s];
      for (std::size_t l = 0; l < p.observed.size(); ++l) {
        o << fmt::format("{}\t{}\t{}\t{}\n", s, l, format_real(p.observed[l]),
                         format_real(p.replicated[l]));
      }
    }
  });
  std::size_t low = 0;
  for (const auto& p : result.periods) low += p.p_value < 0.05;
  r.details()["periods"] = result.periods.size();
  r.details()["p_below_0.05"] = low;
  r.finish();
  r.log() << fmt::format("{} period(s), {} with p < 0.05\n", result.periods.size(), low);
  return 0;
}

int evaluate_friendship(Run& r) {
  if (!r.has("questionnaire")) throw ConfigError("friendship mode needs --questionnaire");
  if (!r.has("id_map")) throw ConfigError("friendship mode needs --id-map");
  std::ifstream qin(r.input("questionnaire"));
  const auto nominations = ingest::parse_questionnaire(qin);
  std::ifstream iin(r.input("id_map"));
  const auto index = ingest::NodeIndex::read(iin);

  std::vector<PairMatrix> means;
  for (const auto& p : r.inputs("predictions")) {
    const auto table = load_predictions(p);
    if (table.n != index.size()) {
      throw DataError(fmt::format("{} has n={}, id map has {} nodes", p.string(), table.n, index.size()));
    }
    means.push_back(mean_matrix(table));
  }
  std::vector<std::vector<bool>> present;
  for (const auto& p : r.optional_inputs("presence")) present.push_back(read_presence(p, index.size()));
  if (!present.empty() && present.size() != means.size()) {
    throw ConfigError("give one presence file per predictions file, or none");
  }

  const auto reciprocated = ingest::to_index_pairs(nominations.reciprocated, index);
  const auto unreciprocated = ingest::to_index_pairs(nominations.unreciprocated, index);
  std::vector<NodePair> excluded = reciprocated;
  excluded.insert(excluded.end(), unreciprocated.begin(), unreciprocated.end());
  const auto seed = r.get<std::uint64_t>("seed");
  r.add_seed(seed);
  Rng rng(seed);
  const auto requested = r.get<std::size_t>("controls");
  const auto controls = ingest::sample_control_pairs(
      index.size(), requested > 0 ? requested : reciprocated.size(), excluded, rng);

  const auto report = eval::friendship_comparison(
      means, present,
      {{"reciprocated", reciprocated}, {"unreciprocated", unreciprocated}, {"control", controls}},
      r.get<int>("bins"));

  r.write("friendship.tsv", [&](std::ostream& o) {
    o << "group\tpairs\tskipped\tmean\n";
    for (const auto& g : report.groups) {
      o << fmt::format("{}\t{}\t{}\t{}\n", g.name, g.values.size(), g.skipped, format_real(g.mean));
    }
  });
  r.write("friendship_hist.tsv", [&](std::ostream& o) {
    o << "bin_lo\tbin_hi";
    for (const auto& g : report.groups) o << '\t' << g.name;
    o << '\n';
    for (std::size_t b = 0; b + 1 < report.bin_edges.size(); ++b) {
      o << format_real(report.bin_edges[b]) << '\t' << format_real(report.bin_edges[b + 1]);
      for (const auto& g : report.groups) o << '\t' << g.histogram[b];
      o << '\n';
    }
  });
  r.write("friendship_values.tsv", [&](std::ostream& o) {
    o << "group\tvalue\n";
    for (const auto& g : report.groups) {
      for (double v : g.values) o << g.name << '\t' << format_real(v) << '\n';
    }
  });
  json summary = json::object();
  for (const auto& g : report.groups) summary[g.name] = g.mean;
  r.details()["group_means"] = summary;
  r.finish();
  for (const auto& g : report.groups) {
    r.log() << fmt::format("{}: {} pairs, mean {:.4f}\n", g.name, g.values.size(), g.mean);
  }
  return 0;
}

int evaluate(Run& r) {
  if (!r.has("mode")) throw ConfigError("--mode is required (auc, ppc or friendship)");
  const auto mode = r.get<std::string>("mode");
  if (mode == "auc") return evaluate_auc(r);
  if (mode == "ppc") return evaluate_ppc(r);
  if (mode == "friendship") return evaluate_friendship(r);
  throw ConfigError(fmt::format("unknown mode '{}' (auc, ppc or friendship)", mode));
}

}  // namespace

CommandDef evaluate_command() {
  CommandDef c;
  c.name = "evaluate";
  c.help = "AUC against a known network, posterior predictive checks, or friendship validation";
  c.defaults = {{"mode", nullptr},         {"predictions", json::array()},
                {"truth", nullptr},        {"exclude", nullptr},
                {"samples", json::array()}, {"obs", json::array()},
                {"questionnaire", nullptr}, {"id_map", nullptr},
                {"presence", json::array()}, {"controls", 0},
                {"bins", 20},              {"seed", 1},
                {"out", nullptr}};
  c.add_flags = [](CLI::App& app, json& f) {
    option<std::string>(app, f, "--mode", "mode", "auc, ppc or friendship");
    option<std::vector<std::string>>(app, f, "--predictions", "predictions",
                                     "Prediction table(s); one per day in friendship mode");
    option<std::string>(app, f, "--truth", "truth", "True network (auc)");
    option<std::string>(app, f, "--exclude", "exclude", "Pairs to leave out of the AUC, e.g. a probit mask");
    option<std::vector<std::string>>(app, f, "--samples", "samples", "Sample files (ppc)");
    option<std::vector<std::string>>(app, f, "--obs", "obs", "Observation files (ppc)");
    option<std::string>(app, f, "--questionnaire", "questionnaire", "Friendship nominations (friendship)");
    option<std::string>(app, f, "--id-map", "id_map", "Node id map written by ingest (friendship)");
    option<std::vector<std::string>>(app, f, "--presence", "presence", "Per-day presence files (friendship)");
    option<std::size_t>(app, f, "--controls", "controls", "Control pairs (default: as many as reciprocated)");
    option<int>(app, f, "--bins", "bins", "Histogram bins over [-1, 1]");
    seed_option(app, f);
    out_option(app, f);
  };
  c.body = evaluate;
  return c;
}

}  // namespace signet::app
