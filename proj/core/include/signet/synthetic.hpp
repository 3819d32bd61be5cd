#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "signet/random.hpp"
#include "signet/types.hpp"

namespace signet::synth {

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

struct SynthConfig {
  std::size_t n = 64;
  double edge_density = 0.4;
  int max_groups = 8;
  /// Fixes the group count instead of drawing it from 1..max_groups.
  std::optional<int> groups;
  Range p_pos{0.8, 0.9};
  Range p_zero{0.2, 0.3};
  Range p_neg{0.0, 0.1};
  Range q{0.01, 0.05};
  int trials = 50;
  /// Observation periods sharing the network; each gets its own partition and rates.
  int periods = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Instance {
  SignedNetwork network;
  std::vector<PeriodState> periods;
  ObservationSet observations;
};

SignedNetwork generate_signed_er(const SynthConfig& config, Rng& rng);

/// Group count uniform on 1..max_groups, nodes assigned uniformly, redrawn
/// until every group is used.
Partition generate_partition(std::size_t n, int max_groups, Rng& rng);
Partition generate_partition_with_groups(std::size_t n, int groups, Rng& rng);

RateParams generate_rates(const SynthConfig& config, Rng& rng);

Instance generate_instance(const SynthConfig& config, Rng& rng);
/// Seeds its own generator from config.seed.
Instance generate_instance(const SynthConfig& config);

/// Share of nonzero-sign pairs whose endpoints share a group; 0 with no edges.
double internal_edge_fraction(const SignedNetwork& net, const Partition& g);

}  // namespace signet::synth
