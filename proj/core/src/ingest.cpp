#include "signet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace signet::ingest {

namespace {

constexpr long long kDay = 86400;

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

long long to_integer(const std::string& tok, std::size_t line_no, const char* what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw DataError(fmt::format("line {}: {} '{}' is not an integer", line_no, what, tok));
  }
  return v;
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double median_nonzero(std::span<const long> counts) {
  std::vector<long> nz;
  for (long c : counts) {
    if (c > 0) nz.push_back(c);
  }
  if (nz.empty()) return 1.0;
  std::sort(nz.begin(), nz.end());
  const std::size_t m = nz.size();
  return m % 2 ? static_cast<double>(nz[m / 2])
               : 0.5 * static_cast<double>(nz[m / 2 - 1] + nz[m / 2]);
}

std::vector<Interval> clock_runs(std::span<const long> counts, double threshold,
                                 long long bin_width) {
  std::vector<Interval> out;
  for (const auto& [b0, b1] : detect_break_bins(counts, threshold)) {
    out.push_back({static_cast<long long>(b0) * bin_width, static_cast<long long>(b1) * bin_width});
  }
  return out;
}

std::vector<Interval> to_absolute(long long day, std::span<const Interval> clock,
                                  long long utc_offset) {
  std::vector<Interval> out;
  for (const auto& iv : clock) {
    out.push_back({day * kDay + iv.start - utc_offset, day * kDay + iv.end - utc_offset});
  }
  return out;
}

}  // namespace

std::vector<ContactEvent> parse_contacts(std::istream& in) {
  std::vector<ContactEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tok = tokenize(line);
    if (tok.size() != 5) {
      throw DataError(fmt::format("line {}: expected `timestamp i j class_i class_j`, got {} fields",
                                  line_no, tok.size()));
    }
    ContactEvent e;
    e.timestamp = to_integer(tok[0], line_no, "timestamp");
    e.i = to_integer(tok[1], line_no, "node id");
    e.j = to_integer(tok[2], line_no, "node id");
    e.class_i = tok[3];
    e.class_j = tok[4];
    if (e.i == e.j) throw DataError(fmt::format("line {}: self-contact of node {}", line_no, e.i));
    out.push_back(std::move(e));
  }
  return out;
}

std::map<NodeId, std::string> parse_metadata(std::istream& in) {
  std::map<NodeId, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tok = tokenize(line);
    if (tok.size() < 2) throw DataError(fmt::format("line {}: expected `id class`", line_no));
    const NodeId id = to_integer(tok[0], line_no, "node id");
    if (!out.emplace(id, tok[1]).second) {
      throw DataError(fmt::format("line {}: node {} listed twice", line_no, id));
    }
  }
  return out;
}

NodeIndex::NodeIndex(std::vector<NodeId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

NodeIndex NodeIndex::from_events(std::span<const ContactEvent> events,
                                 const std::map<NodeId, std::string>& metadata) {
  std::vector<NodeId> ids;
  for (const auto& e : events) {
    ids.push_back(e.i);
    ids.push_back(e.j);
  }
  for (const auto& [id, cls] : metadata) ids.push_back(id);
  return NodeIndex(std::move(ids));
}

std::optional<std::size_t> NodeIndex::find(NodeId id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t NodeIndex::index(NodeId id) const {
  const auto k = find(id);
  if (!k) throw DataError(fmt::format("unknown node id {}", id));
  return *k;
}

void NodeIndex::write(std::ostream& out) const {
  out << "index\tid\n";
  for (std::size_t k = 0; k < ids_.size(); ++k) out << k << '\t' << ids_[k] << '\n';
}

NodeIndex NodeIndex::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<NodeId> ids;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tok = tokenize(line);
    if (!header) {
      if (tok.size() != 2 || tok[0] != "index" || tok[1] != "id") {
        throw DataError(fmt::format("line {}: expected header `index id`", line_no));
      }
      header = true;
      continue;
    }
    if (tok.size() != 2) throw DataError(fmt::format("line {}: expected `index id`", line_no));
    if (to_integer(tok[0], line_no, "index") != static_cast<long long>(ids.size())) {
      throw DataError(fmt::format("line {}: indices must be listed in order", line_no));
    }
    ids.push_back(to_integer(tok[1], line_no, "node id"));
  }
  NodeIndex out(ids);
  if (out.size() != ids.size() || !std::equal(ids.begin(), ids.end(), out.ids_.begin())) {
    throw DataError("id map must list distinct ids in increasing order");
  }
  return out;
}

long long day_of(long long timestamp, long long utc_offset) {
  return floor_div(timestamp + utc_offset, kDay);
}

long long time_of_day(long long timestamp, long long utc_offset) {
  return timestamp + utc_offset - day_of(timestamp, utc_offset) * kDay;
}

std::vector<std::pair<std::size_t, std::size_t>> detect_break_bins(std::span<const long> counts,
                                                                   double threshold,
                                                                   std::size_t merge_gap) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t b = 0; b < counts.size();) {
    if (static_cast<double>(counts[b]) < threshold) {
      ++b;
      continue;
    }
    std::size_t e = b;
    while (e < counts.size() && static_cast<double>(counts[e]) >= threshold) ++e;
    if (!runs.empty() && b - runs.back().second < merge_gap) {
      runs.back().second = e;
    } else {
      runs.emplace_back(b, e);
    }
    b = e;
  }
  return runs;
}

BreakDetection detect_breaks(std::span<const ContactEvent> events, const BreakOptions& options) {
  if (options.bin_width <= 0) throw ConfigError("bin width must be positive");
  const std::size_t bins = static_cast<std::size_t>((kDay + options.bin_width - 1) / options.bin_width);
  std::map<long long, std::vector<long>> per_day;
  for (const auto& e : events) {
    auto& counts = per_day[day_of(e.timestamp, options.utc_offset)];
    if (counts.empty()) counts.assign(bins, 0);
    if (e.class_i != e.class_j) {
      ++counts[static_cast<std::size_t>(time_of_day(e.timestamp, options.utc_offset) /
                                        options.bin_width)];
    }
  }
  BreakDetection out;
  out.schedule.utc_offset = options.utc_offset;
  if (per_day.empty()) {
    out.threshold = options.threshold.value_or(0.0);
    return out;
  }
  if (options.pooled) {
    std::vector<long> pooled(bins, 0);
    for (const auto& [day, counts] : per_day) {
      for (std::size_t b = 0; b < bins; ++b) pooled[b] += counts[b];
    }
    out.threshold = options.threshold.value_or(median_nonzero(pooled));
    const auto clock = clock_runs(pooled, out.threshold, options.bin_width);
    for (const auto& [day, counts] : per_day) {
      out.schedule.days[day] = to_absolute(day, clock, options.utc_offset);
    }
    return out;
  }
  std::vector<long> all;
  for (const auto& [day, counts] : per_day) all.insert(all.end(), counts.begin(), counts.end());
  out.threshold = options.threshold.value_or(median_nonzero(all));
  for (const auto& [day, counts] : per_day) {
    out.schedule.days[day] =
        to_absolute(day, clock_runs(counts, out.threshold, options.bin_width), options.utc_offset);
  }
  return out;
}

BreakSchedule schedule_from_clock(std::span<const ContactEvent> events,
                                  std::span<const Interval> clock_intervals, long long utc_offset) {
  std::vector<Interval> clock(clock_intervals.begin(), clock_intervals.end());
  std::sort(clock.begin(), clock.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t k = 1; k < clock.size(); ++k) {
    if (clock[k].start < clock[k - 1].end) throw ConfigError("break intervals overlap");
  }
  BreakSchedule out;
  out.utc_offset = utc_offset;
  for (const auto& e : events) {
    const long long day = day_of(e.timestamp, utc_offset);
    if (!out.days.count(day)) out.days[day] = to_absolute(day, clock, utc_offset);
  }
  return out;
}

Interval parse_break_override(const std::string& text) {
  const auto bad = [&]() -> ConfigError {
    return ConfigError(fmt::format("break '{}' is not HH:MM+<minutes>m or HH:MM-HH:MM", text));
  };
  const auto clock = [&](const std::string& s) -> long long {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw bad();
    int h = 0, m = 0;
    const auto r1 = std::from_chars(s.data(), s.data() + colon, h);
    const auto r2 = std::from_chars(s.data() + colon + 1, s.data() + s.size(), m);
    if (r1.ec != std::errc{} || r1.ptr != s.data() + colon || r2.ec != std::errc{} ||
        r2.ptr != s.data() + s.size() || h < 0 || h > 24 || m < 0 || m > 59) {
      throw bad();
    }
    return h * 3600LL + m * 60LL;
  };
  if (const auto plus = text.find('+'); plus != std::string::npos) {
    if (text.size() < plus + 3 || text.back() != 'm') throw bad();
    const std::string minutes = text.substr(plus + 1, text.size() - plus - 2);
    int len = 0;
    const auto r = std::from_chars(minutes.data(), minutes.data() + minutes.size(), len);
    if (r.ec != std::errc{} || r.ptr != minutes.data() + minutes.size() || len <= 0) throw bad();
    const long long start = clock(text.substr(0, plus));
    return {start, start + len * 60LL};
  }
  if (const auto dash = text.find('-'); dash != std::string::npos) {
    const Interval iv{clock(text.substr(0, dash)), clock(text.substr(dash + 1))};
    if (iv.end <= iv.start) throw bad();
    return iv;
  }
  throw bad();
}

std::string format_clock(long long seconds_of_day) {
  return fmt::format("{:02}:{:02}:{:02}", seconds_of_day / 3600, (seconds_of_day / 60) % 60,
                     seconds_of_day % 60);
}

std::vector<DayObservations> window_observations(std::span<const ContactEvent> events,
                                                 const BreakSchedule& schedule,
                                                 const NodeIndex& index,
                                                 const WindowOptions& options) {
  if (options.resolution <= 0 || options.window <= 0 || options.window % options.resolution != 0) {
    throw ConfigError("window length must be a positive multiple of the resolution");
  }
  const std::size_t n = index.size();
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return events[a].timestamp < events[b].timestamp;
  });
  std::vector<long long> times(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) times[k] = events[order[k]].timestamp;

  std::vector<DayObservations> out;
  for (const auto& [day, intervals] : schedule.days) {
    DayObservations d;
    d.day = day;
    d.present.assign(n, false);
    {
      const long long day_start = day * kDay - schedule.utc_offset;
      const auto lo = std::lower_bound(times.begin(), times.end(), day_start);
      const auto hi = std::lower_bound(times.begin(), times.end(), day_start + kDay);
      for (auto it = lo; it != hi; ++it) {
        const auto& e = events[order[static_cast<std::size_t>(it - times.begin())]];
        if (auto a = index.find(e.i)) d.present[*a] = true;
        if (auto b = index.find(e.j)) d.present[*b] = true;
      }
    }
    for (const auto& iv : intervals) {
      for (long long ws = iv.start; ws < iv.end; ws += options.window) {
        long long we = ws + options.window;
        if (we > iv.end) {
          if (!options.keep_partial) break;
          we = ws + (iv.end - ws) / options.resolution * options.resolution;
          if (we <= ws) break;
        }
        const int trials = static_cast<int>((we - ws) / options.resolution);
        std::vector<std::pair<std::size_t, long long>> hits;
        const auto lo = std::lower_bound(times.begin(), times.end(), ws);
        const auto hi = std::lower_bound(times.begin(), times.end(), we);
        for (auto it = lo; it != hi; ++it) {
          const auto& e = events[order[static_cast<std::size_t>(it - times.begin())]];
          const auto a = index.find(e.i);
          const auto b = index.find(e.j);
          if (!a || !b) continue;
          hits.emplace_back(pair_index(*a, *b, n), (e.timestamp - ws) / options.resolution);
        }
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        ObservationMatrix x(n, trials);
        for (const auto& [k, slot] : hits) x.set_at_index(k, x.at_index(k) + 1);
        d.windows.push_back({ws, we});
        d.periods.push_back(std::move(x));
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

Nominations parse_questionnaire(std::istream& in) {
  std::set<std::pair<NodeId, NodeId>> directed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tok = tokenize(line);
    if (tok.size() != 2) throw DataError(fmt::format("line {}: expected `i j`", line_no));
    const NodeId a = to_integer(tok[0], line_no, "node id");
    const NodeId b = to_integer(tok[1], line_no, "node id");
    if (a == b) throw DataError(fmt::format("line {}: node {} nominates itself", line_no, a));
    directed.emplace(a, b);
  }
  Nominations out;
  for (const auto& [a, b] : directed) {
    const bool back = directed.count({b, a}) > 0;
    if (back) {
      if (a < b) out.reciprocated.emplace_back(a, b);
    } else {
      out.unreciprocated.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(out.unreciprocated.begin(), out.unreciprocated.end());
  return out;
}

std::vector<NodePair> to_index_pairs(std::span<const std::pair<NodeId, NodeId>> pairs,
                                     const NodeIndex& index) {
  std::vector<NodePair> out;
  for (const auto& [a, b] : pairs) {
    const auto i = index.find(a);
    const auto j = index.find(b);
    if (!i || !j) continue;
    out.push_back({std::min(*i, *j), std::max(*i, *j)});
  }
  return out;
}

std::vector<NodePair> sample_control_pairs(std::size_t n, std::size_t count,
                                           std::span<const NodePair> exclusions, Rng& rng) {
  std::set<std::size_t> excluded;
  for (const auto& p : exclusions) {
    if (p.i >= n || p.j >= n || p.i == p.j) {
      throw DataError(fmt::format("excluded pair ({}, {}) outside node range", p.i, p.j));
    }
    excluded.insert(pair_index(p.i, p.j, n));
  }
  std::vector<std::size_t> pool;
  for (std::size_t k = 0; k < pair_count(n); ++k) {
    if (!excluded.count(k)) pool.push_back(k);
  }
  if (count > pool.size()) {
    throw DataError(fmt::format("cannot draw {} control pairs from {} available", count, pool.size()));
  }
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  std::vector<NodePair> out;
  for (std::size_t k : pool) {
    const auto p = pair_from_index(k, n);
    out.push_back(p);
  }
  return out;
}

}  // namespace signet::ingest
