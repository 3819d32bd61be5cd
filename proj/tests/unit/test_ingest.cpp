#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "signet/ingest.hpp"

using namespace signet;
using namespace signet::ingest;

namespace {

bool error_mentions(const std::function<void()>& f, const std::string& fragment) {
  try {
    f();
  } catch (const std::exception& e) {
    return std::string(e.what()).find(fragment) != std::string::npos;
  }
  return false;
}

ContactEvent contact(long long t, NodeId i, NodeId j, std::string ci = "A", std::string cj = "B") {
  return {t, i, j, std::move(ci), std::move(cj)};
}

}  // namespace

TEST_CASE("contact parsing") {
  std::istringstream in("1000 5 9 1A 1B\n# note\n\n1020 9 12 1B 1B\n");
  const auto events = parse_contacts(in);
  REQUIRE(events.size() == 2);
  CHECK(events[0].timestamp == 1000);
  CHECK(events[0].i == 5);
  CHECK(events[1].class_j == "1B");

  CHECK(error_mentions([] {
    std::istringstream bad("1000 5 9 1A 1B\n1020 5 9 1A\n");
    parse_contacts(bad);
  }, "line 2"));
  CHECK(error_mentions([] {
    std::istringstream bad("1000 5 5 1A 1A\n");
    parse_contacts(bad);
  }, "self-contact"));
  std::istringstream empty("");
  CHECK(parse_contacts(empty).empty());

  std::istringstream meta("5 1A F\n9 1B\n");
  CHECK(parse_metadata(meta).at(9) == "1B");
  std::istringstream dup("5 1A\n5 1B\n");
  CHECK_THROWS_AS(parse_metadata(dup), DataError);
}

TEST_CASE("node index") {
  const std::vector<ContactEvent> events{contact(0, 40, 7), contact(1, 7, 19)};
  const auto idx = NodeIndex::from_events(events, {{3, "X"}});
  CHECK(idx.size() == 4);
  CHECK(idx.index(3) == 0);
  CHECK(idx.index(40) == 3);
  CHECK_FALSE(idx.find(8).has_value());
  CHECK_THROWS_AS(idx.index(8), DataError);
  std::ostringstream out;
  idx.write(out);
  std::istringstream in(out.str());
  CHECK(NodeIndex::read(in) == idx);
  std::istringstream bad("index\tid\n0\t5\n1\t4\n");
  CHECK_THROWS_AS(NodeIndex::read(bad), DataError);
}

TEST_CASE("break runs") {
  const std::vector<long> counts{0, 0, 50, 50, 0};
  const auto runs = detect_break_bins(counts, 10);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0] == std::pair<std::size_t, std::size_t>{2, 4});
  CHECK(detect_break_bins(std::vector<long>{1, 2, 3}, 10).empty());
  const std::vector<long> split{20, 0, 20, 0, 0, 20};
  CHECK(detect_break_bins(split, 10).size() == 3);
  CHECK(detect_break_bins(split, 10, 2).size() == 2);
}

TEST_CASE("break detection from cross-class contacts") {
  std::vector<ContactEvent> events;
  // Two days; cross-class bursts 10:00-10:15 each day, sparse same-class contacts elsewhere.
  for (long long day = 0; day < 2; ++day) {
    const long long base = day * 86400;
    for (long long s = 36000; s < 36900; s += 20) events.push_back(contact(base + s, 1, 2, "A", "B"));
    for (long long s = 30000; s < 50000; s += 600) events.push_back(contact(base + s, 1, 3, "A", "A"));
    events.push_back(contact(base + 45000, 2, 3, "B", "A"));
  }
  BreakOptions opts;
  opts.threshold = 10;
  const auto det = detect_breaks(events, opts);
  REQUIRE(det.schedule.days.size() == 2);
  for (const auto& [day, ivs] : det.schedule.days) {
    REQUIRE(ivs.size() == 1);
    CHECK(ivs[0] == Interval{day * 86400 + 36000, day * 86400 + 36900});
  }
  opts.pooled = false;
  CHECK(detect_breaks(events, opts).schedule.days.at(1).size() == 1);

  // Shifting every timestamp by a whole day shifts the schedule by a day.
  auto shifted = events;
  for (auto& e : shifted) e.timestamp += 86400;
  opts.pooled = true;
  CHECK(detect_breaks(shifted, opts).schedule.days.at(2)[0].start == 2 * 86400 + 36000);
}

TEST_CASE("break overrides") {
  CHECK(parse_break_override("08:55+15m") == Interval{8 * 3600 + 55 * 60, 9 * 3600 + 10 * 60});
  CHECK(parse_break_override("11:10-13:15") == Interval{11 * 3600 + 600, 13 * 3600 + 900});
  for (const char* bad : {"8:55", "08:55+m", "13:00-12:00", "ab:cd+5m", "08:75+5m"}) {
    CHECK_THROWS_AS(parse_break_override(bad), ConfigError);
  }
  CHECK(format_clock(8 * 3600 + 55 * 60) == "08:55:00");
}

TEST_CASE("windowed observation matrices") {
  std::vector<ContactEvent> events;
  const long long start = 36000;
  // Three distinct 20 s slots for (1, 2), with a duplicate contact in the first one.
  for (long long s : {0, 5, 40, 200}) events.push_back(contact(start + s, 1, 2));
  events.push_back(contact(start + 10, 2, 3));
  events.push_back(contact(70000, 4, 1));  // outside any break
  const auto idx = NodeIndex::from_events(events);
  const std::vector<Interval> clock{{start, start + 900}};
  const auto sched = schedule_from_clock(events, clock, 0);
  const auto days = window_observations(events, sched, idx, {});
  REQUIRE(days.size() == 1);
  const auto& d = days[0];
  CHECK(d.periods.size() == 3);  // 900 s holds three whole 240 s windows
  CHECK(d.periods[0].trials() == 12);
  CHECK(d.periods[0].get(idx.index(1), idx.index(2)) == 3);
  CHECK(d.periods[0].get(idx.index(2), idx.index(3)) == 1);
  CHECK(d.periods[1].get(idx.index(1), idx.index(2)) == 0);
  CHECK(d.present == std::vector<bool>{true, true, true, true});

  WindowOptions partial;
  partial.keep_partial = true;
  const auto kept = window_observations(events, sched, idx, partial);
  CHECK(kept[0].periods.size() == 4);
  CHECK(kept[0].periods[3].trials() == 9);

  // Event order in the input does not matter.
  auto reversed = events;
  std::reverse(reversed.begin(), reversed.end());
  const auto again = window_observations(reversed, sched, idx, {});
  for (std::size_t k = 0; k < 3; ++k) CHECK(again[0].periods[k] == d.periods[k]);

  WindowOptions bad;
  bad.resolution = 7;
  CHECK_THROWS_AS(window_observations(events, sched, idx, bad), ConfigError);
}

TEST_CASE("questionnaire nominations") {
  std::istringstream in("1 2\n2 1\n1 3\n4 2\n");
  const auto nom = parse_questionnaire(in);
  CHECK(nom.reciprocated == std::vector<std::pair<NodeId, NodeId>>{{1, 2}});
  CHECK(nom.unreciprocated == std::vector<std::pair<NodeId, NodeId>>{{1, 3}, {2, 4}});
  std::istringstream self("1 1\n");
  CHECK_THROWS_AS(parse_questionnaire(self), DataError);
  const NodeIndex idx(std::vector<NodeId>{1, 2, 4});
  CHECK(to_index_pairs(nom.unreciprocated, idx) == std::vector<NodePair>{{1, 2}});
}

TEST_CASE("control pairs") {
  Rng rng(3);
  const std::vector<NodePair> excl{{0, 1}, {2, 3}};
  const auto all = sample_control_pairs(4, 4, excl, rng);
  CHECK(all == std::vector<NodePair>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  CHECK_THROWS_AS(sample_control_pairs(4, 5, excl, rng), DataError);

  Rng a(9), b(9);
  CHECK(sample_control_pairs(20, 30, excl, a) == sample_control_pairs(20, 30, excl, b));

  // One pair out of the 4 allowed: each should appear about a quarter of the time.
  std::map<NodePair, int> freq;
  const int draws = 40000;
  for (int k = 0; k < draws; ++k) ++freq[sample_control_pairs(4, 1, excl, rng)[0]];
  CHECK(freq.size() == 4);
  for (const auto& [p, c] : freq) CHECK(std::abs(c - draws / 4.0) < 4.0 * std::sqrt(draws * 0.1875));
}
