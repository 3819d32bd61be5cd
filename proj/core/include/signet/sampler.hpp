#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "signet/model.hpp"
#include "signet/random.hpp"
#include "signet/types.hpp"

namespace signet {

struct SamplerConfig {
  double sigma_intra = 0.01;
  double sigma_inter = 0.1;
  int sweeps = 2000;
  int burn_in = 1000;
  int thin = 10;
  std::uint64_t seed = 1;
  /// Run the one-group phase before sampling and restart partitions from singletons.
  bool smart_init = true;
  /// Length of the one-group phase; negative means 20% of `sweeps`.
  int init_sweeps = -1;
  /// Edge-flip proposals per unordered pair per sweep.
  int flips_per_pair = 1;
  /// When positive, the edge block makes this many proposals on uniformly
  /// drawn pairs instead of passing over every pair.
  int edge_proposals = 0;
  /// Keep rates at `initial_rates` (no rate moves).
  bool freeze_rates = false;
  RateParams initial_rates{};
  Priors priors{};

  void validate() const;
  int resolved_init_sweeps() const;
};

struct TemperatureLadder {
  std::vector<double> betas{1.0, 0.8, 0.64, 0.512, 0.4096};
  int swap_interval = 10;

  void validate() const;
  static TemperatureLadder geometric(std::size_t replicas, double ratio, int swap_interval);
};

struct KernelCounter {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

struct MoveStats {
  KernelCounter edge, intra, inter, partition, swap;
};

struct SampleSet {
  std::vector<ModelState> draws;
  MoveStats stats;

  std::size_t size() const { return draws.size(); }
  bool empty() const { return draws.empty(); }
};

enum class RateSlot { p_neg, p_zero, p_pos, q };

RateSlot rate_slot_for(Sign s);
double rate_value(const RateParams& rates, RateSlot slot);
RateParams with_rate(RateParams rates, RateSlot slot, double value);

struct EdgeFlip {
  NodePair pair;
  Sign new_sign = Sign::absent;
};

// Direct (reference) forms of the proposal kernels and their acceptance
// log-ratios, evaluated from the state and observations without caches.

EdgeFlip propose_edge_flip(const ModelState& state, Rng& rng);
Sign propose_other_sign(Sign current, Rng& rng);

/// Log posterior ratio of flipping `pair` to `new_sign`; the proposal is symmetric.
double edge_flip_log_ratio(const ModelState& state, const ObservationSet& obs,
                           const Priors& priors, NodePair pair, Sign new_sign);

double propose_rate(double current, double sigma, Rng& rng);

double intra_rate_log_ratio(const ModelState& state, const ObservationSet& obs,
                            std::size_t period, Sign sign, double p_new);

double inter_rate_log_ratio(const ModelState& state, const ObservationSet& obs,
                            std::size_t period, double q_new);

/// Proposal probabilities for moving `node` to each existing group 0..gamma-1
/// and, in the last slot, to a new group.
std::vector<double> partition_proposal_distribution(const ModelState& state,
                                                    const ObservationSet& obs,
                                                    std::size_t period, std::size_t node);

/// Likelihood log-ratio of the move plus log[kappa(g'->g) / kappa(g->g')],
/// with the reverse proposal evaluated on the re-indexed partition.
double partition_move_log_ratio(const ModelState& state, const ObservationSet& obs,
                                std::size_t period, std::size_t node, int target);

/// Which blocks a sweep updates.
struct SweepBlocks {
  bool network = true;
  bool intra = true;
  bool inter = true;
  bool partition = true;
};

/// One Metropolis-Hastings chain with cached per-period sufficient statistics,
/// so every acceptance ratio costs O(periods) (edges, rates) or O(n) (partition
/// moves). The cached log posterior is updated incrementally.
class Chain {
 public:
  Chain(const ObservationSet& obs, const SamplerConfig& config, ModelState initial, Rng rng,
        double beta = 1.0);

  const ModelState& state() const { return state_; }
  double log_posterior() const { return state_.log_posterior; }
  double beta() const { return beta_; }
  void set_beta(double beta) { beta_ = beta; }
  const MoveStats& stats() const { return stats_; }
  Rng& rng() { return rng_; }

  void set_state(ModelState state);
  /// Re-evaluates the posterior from scratch and resets the cache.
  void recompute();
  void swap_state(Chain& other);

  void sweep();
  void sweep(const SweepBlocks& blocks);

  // Untempered kernel log-ratios from the cached statistics.
  double edge_flip_log_ratio(std::size_t pair, Sign new_sign) const;
  double rate_log_ratio(std::size_t period, RateSlot slot, double value) const;
  /// Posterior log-ratio plus proposal correction.
  double partition_move_log_ratio(std::size_t period, std::size_t node, int target) const;

  bool edge_step(std::size_t pair);
  bool rate_step(std::size_t period, RateSlot slot);
  bool partition_step(std::size_t period, std::size_t node);

 private:
  // Sufficient statistics per period: pair and success totals for the three
  // intra-group classes (by sign) and the cross-group class.
  struct ClassTotals {
    long pairs = 0;
    long successes = 0;
  };
  struct PeriodCache {
    std::array<ClassTotals, 4> totals{};
    // log r and log(1 - r) per class for the current rates.
    std::array<double, 4> log_rate{};
    std::array<double, 4> log_miss{};
  };
  static constexpr std::size_t kCross = 3;

  struct MoveTerms {
    double log_posterior = 0.0;
    double log_proposal = 0.0;
  };

  void rebuild_cache();
  void refresh_log_rates(std::size_t period);
  std::size_t pair_class(std::size_t period, std::size_t i, std::size_t j) const;
  // Per-group count totals and intra-minus-cross log-likelihood gains for `node`.
  void gather_groups(std::size_t period, std::size_t node, std::vector<long>& counts,
                     std::vector<double>& gains) const;
  MoveTerms partition_terms(std::size_t period, std::size_t node, int target,
                            const std::vector<long>& counts,
                            const std::vector<double>& gains) const;
  void apply_partition_move(std::size_t period, std::size_t node, int target);
  bool accept(double log_ratio);

  const ObservationSet* obs_;
  SamplerConfig config_;
  ModelState state_;
  Rng rng_;
  double beta_;
  std::vector<PeriodCache> cache_;
  std::vector<NodePair> pairs_;
  std::vector<std::size_t> order_;
  std::vector<long> group_counts_;
  std::vector<double> group_gains_;
  MoveStats stats_;
};

/// A = 0, rates from the config, all-singleton partitions.
ModelState initial_state(const ObservationSet& obs, const SamplerConfig& config);

/// One full sweep: edges, intra rates, q, then partitions.
ModelState sweep(const ModelState& state, const ObservationSet& obs, const SamplerConfig& config,
                 Rng& rng);

/// Burn-in with every period's partition frozen to one group (network and
/// intra rates only), then partitions reset to singletons.
ModelState smart_init(const ObservationSet& obs, const SamplerConfig& config, Rng& rng);

SampleSet run_chain(const ObservationSet& obs, const SamplerConfig& config, Rng& rng);

/// log alpha_swap for exchanging replicas at inverse temperatures beta_u, beta_v.
double swap_log_acceptance(double beta_u, double beta_v, double log_post_u, double log_post_v);

/// Parallel tempering; samples come from the beta = 1 replica. Replicas sweep
/// concurrently on up to `workers` threads between swap points.
SampleSet run_tempered(const ObservationSet& obs, const SamplerConfig& config,
                       const TemperatureLadder& ladder, Rng& rng, int workers = 1);

}  // namespace signet
