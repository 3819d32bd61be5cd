#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "signet/model.hpp"
#include "signet/random.hpp"
#include "signet/types.hpp"

namespace fixtures {

using namespace signet;

/// URBG stuck at its minimum: every Bernoulli draw with p > 0 succeeds.
struct AlwaysMin {
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return 0; }
};

inline RateParams random_rates(Rng& rng) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (;;) {
    std::array<double, 3> p{u(rng), u(rng), u(rng)};
    std::sort(p.begin(), p.end());
    RateParams r{p[0], p[1], p[2], u(rng)};
    if (r.valid()) return r;
  }
}

inline SignedNetwork random_network(std::size_t n, Rng& rng) {
  SignedNetwork net(n);
  std::uniform_int_distribution<int> s(0, 2);
  for (std::size_t k = 0; k < net.pair_total(); ++k) net.set_at_index(k, sign_from_index(s(rng)));
  return net;
}

inline Partition random_partition(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> g(0, static_cast<int>(n) - 1);
  const int groups = g(rng) + 1;
  std::uniform_int_distribution<int> pick(0, groups - 1);
  std::vector<int> labels(n);
  for (auto& l : labels) l = pick(rng);
  return Partition::from_labels(labels);
}

inline ObservationSet random_observations(std::size_t n, std::size_t periods, int t, Rng& rng) {
  std::vector<ObservationMatrix> mats;
  std::uniform_int_distribution<int> c(0, t);
  for (std::size_t s = 0; s < periods; ++s) {
    ObservationMatrix x(n, t);
    for (std::size_t k = 0; k < pair_count(n); ++k) x.set_at_index(k, c(rng));
    mats.push_back(x);
  }
  return ObservationSet(std::move(mats));
}

inline ModelState random_state(const ObservationSet& obs, const Priors& priors, Rng& rng) {
  ModelState st;
  st.network = random_network(obs.n(), rng);
  for (std::size_t s = 0; s < obs.size(); ++s) {
    st.periods.push_back({random_partition(obs.n(), rng), random_rates(rng)});
  }
  st.log_posterior = log_posterior(st, obs, priors);
  return st;
}

inline ObservationSet single(ObservationMatrix x) {
  return ObservationSet(std::vector<ObservationMatrix>{std::move(x)});
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

// Proposal probability of moving `node` to `target` written out from the
// definition: (1 + counts into the group) / (node total + gamma + 1).
inline double kappa(const Partition& g, const ObservationMatrix& x, std::size_t node, int target) {
  double into = 0.0, total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == node) continue;
    total += x.get(node, j);
    if (g.label(j) == target) into += x.get(node, j);
  }
  const double gamma = static_cast<double>(g.group_count());
  return (target < static_cast<int>(g.group_count()) ? 1.0 + into : 1.0) / (total + gamma + 1.0);
}

}  // namespace fixtures
