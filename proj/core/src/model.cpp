#include "signet/model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace signet {

double log_binomial_term(int x, int t, double p) {
  if (x < 0 || x > t) throw std::domain_error(fmt::format("count {} outside [0, {}]", x, t));
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(fmt::format("probability {} outside (0, 1)", p));
  }
  const double log_choose =
      std::lgamma(t + 1.0) - std::lgamma(x + 1.0) - std::lgamma(t - x + 1.0);
  return log_choose + x * std::log(p) + (t - x) * std::log1p(-p);
}

double log_likelihood(const ObservationMatrix& obs, const SignedNetwork& net,
                      const Partition& g, const RateParams& rates) {
  const std::size_t n = obs.n();
  if (net.n() != n || g.size() != n) {
    throw std::invalid_argument(fmt::format(
        "dimension mismatch: observations n={}, network n={}, partition n={}", n, net.n(),
        g.size()));
  }
  double total = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      total += log_binomial_term(obs.at_index(k), obs.trials(), pair_rate(net, g, rates, i, j));
    }
  }
  return total;
}

double log_network_prior(const SignedNetwork& net, const Priors& priors) {
  std::array<std::size_t, 3> counts{};
  for (Sign s : net.upper()) ++counts[static_cast<std::size_t>(sign_index(s))];
  double total = 0.0;
  for (Sign s : kAllSigns) {
    const auto c = counts[static_cast<std::size_t>(sign_index(s))];
    if (c > 0) total += static_cast<double>(c) * priors.log_rho(s);
  }
  return total;
}

void check_dimensions(const ModelState& state, const ObservationSet& obs) {
  if (state.periods.size() != obs.size()) {
    throw std::invalid_argument(fmt::format("state has {} periods, observations have {}",
                                            state.periods.size(), obs.size()));
  }
  if (state.network.n() != obs.n()) {
    throw std::invalid_argument(
        fmt::format("network n={} but observations n={}", state.network.n(), obs.n()));
  }
}

double log_posterior(const ModelState& state, const ObservationSet& obs, const Priors& priors) {
  check_dimensions(state, obs);
  for (const auto& period : state.periods) {
    if (!period.rates.valid()) return kNegInf;
  }
  double total = log_network_prior(state.network, priors);
  for (std::size_t s = 0; s < obs.size(); ++s) {
    total += log_likelihood(obs[s], state.network, state.periods[s].partition,
                            state.periods[s].rates);
  }
  return total;
}

PairMatrix expected_counts(const SignedNetwork& net, const Partition& g, const RateParams& rates,
                           int trials) {
  PairMatrix out(net.n());
  std::size_t k = 0;
  for (std::size_t i = 0; i < net.n(); ++i) {
    for (std::size_t j = i + 1; j < net.n(); ++j, ++k) {
      out.at_index(k) = trials * pair_rate(net, g, rates, i, j);
    }
  }
  return out;
}

}  // namespace signet
