#pragma once

#include <array>
#include <span>
#include <vector>

#include "signet/sampler.hpp"
#include "signet/types.hpp"

namespace signet {

/// Per-pair sign probabilities, ordered (negative, absent, positive).
class EdgeMarginals {
 public:
  using Triple = std::array<double, 3>;

  EdgeMarginals() = default;
  explicit EdgeMarginals(std::size_t n) : n_(n), probs_(pair_count(n), Triple{}) {}

  std::size_t n() const { return n_; }
  const Triple& operator()(std::size_t i, std::size_t j) const {
    return probs_[pair_index(i, j, n_)];
  }
  Triple& operator()(std::size_t i, std::size_t j) { return probs_[pair_index(i, j, n_)]; }
  const Triple& at_index(std::size_t k) const { return probs_[k]; }
  Triple& at_index(std::size_t k) { return probs_[k]; }
  std::span<const Triple> values() const { return probs_; }

 private:
  std::size_t n_ = 0;
  std::vector<Triple> probs_;
};

/// Empirical sign frequencies over draws. Throws DataError when empty.
EdgeMarginals edge_marginals(const SampleSet& samples);
/// Same, pooled over several sample sets (e.g. independent chains).
EdgeMarginals edge_marginals(std::span<const SampleSet> chains);
EdgeMarginals edge_marginals(std::span<const SignedNetwork> networks);

/// P(+1) - P(-1) per pair.
PairMatrix posterior_mean(const EdgeMarginals& m);

/// Entropy of each pair's sign distribution in nats, with 0 log 0 = 0.
double triple_entropy(const EdgeMarginals::Triple& p);
PairMatrix edge_entropy(const EdgeMarginals& m);

}  // namespace signet
