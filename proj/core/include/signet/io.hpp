#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "signet/estimation.hpp"
#include "signet/sampler.hpp"
#include "signet/types.hpp"

namespace signet {

// Observation files. Single period:
//
//   n=<int> t=<int>
//   i j count
//
// Multiple periods in one file:
//
//   n=<int> periods=<int> t=<t0>,<t1>,...
//   period i j count
//
// Node indices are 0-based, each unordered pair at most once, missing pairs
// are 0. Blank lines and lines starting with '#' are ignored.

ObservationSet read_observations(std::istream& in);
ObservationSet read_observation_file(const std::filesystem::path& path);
/// Concatenates the periods of several files, in order.
ObservationSet read_observation_files(std::span<const std::filesystem::path> paths);
void write_observations(std::ostream& out, const ObservationSet& obs);

/// `n=<int>` header, then `i j sign` for every nonzero pair.
SignedNetwork read_network(std::istream& in);
void write_network(std::ostream& out, const SignedNetwork& net);

/// `i group` per node, or `period i group` when there are several periods.
std::vector<Partition> read_partitions(std::istream& in);
void write_partitions(std::ostream& out, std::span<const Partition> partitions);

/// Table with header `period p_neg p_zero p_pos q`.
std::vector<RateParams> read_rates(std::istream& in);
void write_rates(std::ostream& out, std::span<const RateParams> rates);

// Sample files: one JSON object per line,
//   {"draw":k,"log_posterior":x,"signs":"+0-...","periods":[{"gamma":g,
//    "labels":[...],"p_neg":..,"p_zero":..,"p_pos":..,"q":..}, ...]}
// where `signs` lists the upper triangle row by row.

void write_sample(std::ostream& out, std::size_t draw, const ModelState& state);
void write_samples(std::ostream& out, const SampleSet& samples);
SampleSet read_samples(std::istream& in);
SampleSet read_sample_file(const std::filesystem::path& path);

/// Per-pair predictions shared by every reconstruction method.
struct PredictionRow {
  std::size_t i = 0;
  std::size_t j = 0;
  std::array<double, 3> probs{};
  double mean = 0.0;
  double entropy = 0.0;
  /// Ranking scores for positive-vs-rest and negative-vs-rest classification.
  double score_pos = 0.0;
  double score_neg = 0.0;
};

struct PredictionTable {
  std::size_t n = 0;
  std::vector<PredictionRow> rows;
};

/// Rows for every pair; scores are P(+1) and P(-1).
PredictionTable prediction_table(const EdgeMarginals& m);

// Tab-separated, preceded by `# n=<int>`:
//   i j p_neg p_zero p_pos mean entropy score_pos score_neg
void write_prediction_table(std::ostream& out, const PredictionTable& table);
PredictionTable read_prediction_table(std::istream& in);

/// Posterior-mean matrix from a prediction table (pairs without a row are 0).
PairMatrix mean_matrix(const PredictionTable& table);

/// Shortest round-trip text for a double.
std::string format_real(double v);

}  // namespace signet
