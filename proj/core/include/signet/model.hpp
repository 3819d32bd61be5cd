#pragma once

#include "signet/random.hpp"
#include "signet/types.hpp"

namespace signet {

/// log[C(t, x) p^x (1-p)^(t-x)]. Throws std::domain_error unless 0 <= x <= t
/// and 0 < p < 1.
double log_binomial_term(int x, int t, double p);

/// Interaction probability of pair (i, j): p_{A_ij} inside a group, q across.
inline double pair_rate(const SignedNetwork& net, const Partition& g, const RateParams& rates,
                        std::size_t i, std::size_t j) {
  return g.same_group(i, j) ? rates.intra(net.get(i, j)) : rates.q;
}

double log_likelihood(const ObservationMatrix& obs, const SignedNetwork& net,
                      const Partition& g, const RateParams& rates);

/// Sum of log rho over all unordered pairs.
double log_network_prior(const SignedNetwork& net, const Priors& priors);

/// Unnormalized log posterior of a state. Partition and rate prior constants
/// are dropped; any period whose rates violate the ordering gives -inf.
/// The state's cached value is ignored.
double log_posterior(const ModelState& state, const ObservationSet& obs, const Priors& priors);

PairMatrix expected_counts(const SignedNetwork& net, const Partition& g, const RateParams& rates,
                           int trials);

/// Binomial draw as a sum of Bernoulli trials, success when u < p.
template <class URBG>
int binomial_draw(int trials, double p, URBG& rng) {
  int successes = 0;
  for (int k = 0; k < trials; ++k) {
    if (uniform01(rng) < p) ++successes;
  }
  return successes;
}

template <class URBG>
ObservationMatrix sample_observations(const SignedNetwork& net, const Partition& g,
                                      const RateParams& rates, int trials, URBG& rng) {
  ObservationMatrix out(net.n(), trials);
  std::size_t k = 0;
  for (std::size_t i = 0; i < net.n(); ++i) {
    for (std::size_t j = i + 1; j < net.n(); ++j, ++k) {
      out.set_at_index(k, binomial_draw(trials, pair_rate(net, g, rates, i, j), rng));
    }
  }
  return out;
}

void check_dimensions(const ModelState& state, const ObservationSet& obs);

}  // namespace signet
