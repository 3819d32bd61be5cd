#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signet/random.hpp"
#include "signet/types.hpp"

namespace signet::ingest {

using NodeId = long long;

/// One recorded contact, `timestamp i j class_i class_j`.
struct ContactEvent {
  long long timestamp = 0;
  NodeId i = 0;
  NodeId j = 0;
  std::string class_i;
  std::string class_j;
};

/// Malformed lines throw DataError naming the line.
std::vector<ContactEvent> parse_contacts(std::istream& in);

/// `id class [extra fields...]` per line.
std::map<NodeId, std::string> parse_metadata(std::istream& in);

/// Dense 0..n-1 indices for raw node ids, in increasing id order.
class NodeIndex {
 public:
  NodeIndex() = default;
  explicit NodeIndex(std::vector<NodeId> ids);
  static NodeIndex from_events(std::span<const ContactEvent> events,
                               const std::map<NodeId, std::string>& metadata = {});

  std::size_t size() const { return ids_.size(); }
  std::size_t index(NodeId id) const;
  std::optional<std::size_t> find(NodeId id) const;
  NodeId id(std::size_t index) const { return ids_[index]; }
  std::span<const NodeId> ids() const { return ids_; }

  /// Tab-separated `index id` rows under a header.
  void write(std::ostream& out) const;
  static NodeIndex read(std::istream& in);

  bool operator==(const NodeIndex&) const = default;

 private:
  std::vector<NodeId> ids_;
};

struct Interval {
  long long start = 0;
  long long end = 0;  // exclusive
  bool operator==(const Interval&) const = default;
};

/// Break intervals per calendar day, in absolute timestamps.
struct BreakSchedule {
  std::map<long long, std::vector<Interval>> days;
  /// Offset used to assign timestamps to calendar days.
  long long utc_offset = 0;
};

/// Calendar day and time of day of a timestamp shifted by `utc_offset` seconds.
long long day_of(long long timestamp, long long utc_offset);
long long time_of_day(long long timestamp, long long utc_offset);

/// Runs of bins with count >= threshold as half-open [first, last+1) bin
/// ranges; runs separated by fewer than `merge_gap` bins are joined.
std::vector<std::pair<std::size_t, std::size_t>> detect_break_bins(std::span<const long> counts,
                                                                   double threshold,
                                                                   std::size_t merge_gap = 0);

struct BreakOptions {
  long long bin_width = 300;
  /// Defaults to the median of the nonzero per-bin cross-class counts.
  std::optional<double> threshold;
  long long utc_offset = 0;
  /// Detect one time-of-day schedule from counts pooled over days and apply
  /// it to every day, instead of detecting day by day.
  bool pooled = true;
};

struct BreakDetection {
  BreakSchedule schedule;
  double threshold = 0.0;
};

BreakDetection detect_breaks(std::span<const ContactEvent> events, const BreakOptions& options);

/// Applies the same time-of-day intervals to every day present in `events`.
BreakSchedule schedule_from_clock(std::span<const ContactEvent> events,
                                  std::span<const Interval> clock_intervals, long long utc_offset);

/// Parses `HH:MM+<minutes>m` or `HH:MM-HH:MM` into a time-of-day interval.
Interval parse_break_override(const std::string& text);
std::string format_clock(long long seconds_of_day);

struct WindowOptions {
  long long window = 240;
  long long resolution = 20;
  /// Keep trailing partial windows with proportionally fewer trials.
  bool keep_partial = false;
};

struct DayObservations {
  long long day = 0;
  std::vector<Interval> windows;
  /// Empty when the day has no complete window.
  std::vector<ObservationMatrix> periods;
  /// Nodes with at least one recorded contact that day.
  std::vector<bool> present;
};

/// One observation matrix per window; X_ij counts resolution slots with at
/// least one contact between i and j.
std::vector<DayObservations> window_observations(std::span<const ContactEvent> events,
                                                 const BreakSchedule& schedule,
                                                 const NodeIndex& index,
                                                 const WindowOptions& options);

struct Nominations {
  std::vector<std::pair<NodeId, NodeId>> reciprocated;    // each pair once, smaller id first
  std::vector<std::pair<NodeId, NodeId>> unreciprocated;
};

/// `i j` lines meaning i names j as a friend.
Nominations parse_questionnaire(std::istream& in);

/// Maps raw id pairs to dense indices, dropping pairs with unknown nodes.
std::vector<NodePair> to_index_pairs(std::span<const std::pair<NodeId, NodeId>> pairs,
                                     const NodeIndex& index);

/// `count` distinct unordered pairs chosen uniformly among those not excluded.
std::vector<NodePair> sample_control_pairs(std::size_t n, std::size_t count,
                                           std::span<const NodePair> exclusions, Rng& rng);

}  // namespace signet::ingest
