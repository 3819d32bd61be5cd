#include <doctest.h>

#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "signet/estimation.hpp"
#include "signet/evaluation.hpp"
#include "signet/model.hpp"

using namespace signet;
using doctest::Approx;

namespace {

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Plain midpoint-grid integration over the ordered rate region, with no
// closed forms: the q factor and the ordered (p-, p0, p+) factor are each
// summed on their own grid since they touch disjoint pairs.
EdgeMarginals grid_oracle(const ObservationSet& obs, const Priors& priors, int cells) {
  const std::size_t n = obs.n();
  const std::size_t pairs = pair_count(n);
  const auto partitions = eval::enumerate_partitions(n);
  std::vector<double> grid;
  for (int c = 0; c < cells; ++c) grid.push_back((c + 0.5) / cells);
  const double log_cell = -std::log(static_cast<double>(cells));

  std::vector<double> log_weight;
  std::vector<SignedNetwork> nets;
  std::size_t total = 1;
  for (std::size_t k = 0; k < pairs; ++k) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    SignedNetwork a(n);
    std::size_t c = code;
    for (std::size_t k = 0; k < pairs; ++k, c /= 3) a.set_at_index(k, sign_from_index(static_cast<int>(c % 3)));
    double lw = log_network_prior(a, priors);
    for (std::size_t s = 0; s < obs.size(); ++s) {
      const auto& x = obs[s];
      const int t = x.trials();
      double period = -INFINITY;
      for (const auto& g : partitions) {
        double q_part = -INFINITY;
        for (double q : grid) {
          double l = log_cell;
          for (std::size_t k = 0; k < pairs; ++k) {
            const auto [i, j] = pair_from_index(k, n);
            if (!g.same_group(i, j)) l += log_binomial_term(x.at_index(k), t, q);
          }
          q_part = log_add(q_part, l);
        }
        double p_part = -INFINITY;
        for (double p0 : grid) {
          for (double pn : grid) {
            if (pn >= p0) break;
            for (double pp : grid) {
              if (pp <= p0) continue;
              const double r[3] = {pn, p0, pp};
              double l = 3.0 * log_cell;
              for (std::size_t k = 0; k < pairs; ++k) {
                const auto [i, j] = pair_from_index(k, n);
                if (g.same_group(i, j)) {
                  l += log_binomial_term(x.at_index(k), t, r[sign_index(a.at_index(k))]);
                }
              }
              p_part = log_add(p_part, l);
            }
          }
        }
        period = log_add(period, q_part + p_part);
      }
      lw += period;
    }
    nets.push_back(a);
    log_weight.push_back(lw);
  }
  double norm = -INFINITY;
  for (double w : log_weight) norm = log_add(norm, w);
  EdgeMarginals out(n);
  for (std::size_t a = 0; a < nets.size(); ++a) {
    const double p = std::exp(log_weight[a] - norm);
    for (std::size_t k = 0; k < pairs; ++k) out.at_index(k)[sign_index(nets[a].at_index(k))] += p;
  }
  return out;
}

double max_tv(const EdgeMarginals& a, const EdgeMarginals& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    double tv = 0.0;
    for (int c = 0; c < 3; ++c) tv += std::abs(a.at_index(k)[c] - b.at_index(k)[c]);
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

}  // namespace

TEST_CASE("set partitions are enumerated once each") {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52};
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto parts = eval::enumerate_partitions(n);
    CHECK(parts.size() == bell[n]);
    for (std::size_t a = 0; a < parts.size(); ++a) {
      for (std::size_t b = a + 1; b < parts.size(); ++b) CHECK_FALSE(parts[a] == parts[b]);
    }
  }
}

TEST_CASE("oracle marginals on two nodes") {
  ObservationMatrix x(2, 10);
  x.set(0, 1, 10);
  const auto m = eval::brute_force_marginals(fixtures::single(x), {});
  CHECK(m(0, 1)[2] > m(0, 1)[1]);
  CHECK(m(0, 1)[2] > m(0, 1)[0]);
  CHECK(m(0, 1)[0] + m(0, 1)[1] + m(0, 1)[2] == Approx(1.0).epsilon(1e-12));

  x.set(0, 1, 0);
  const auto z = eval::brute_force_marginals(fixtures::single(x), {});
  CHECK(z(0, 1)[0] > z(0, 1)[2]);

  CHECK_THROWS_AS(eval::brute_force_marginals(fixtures::single(ObservationMatrix(5, 3)), {}),
                  DataError);
}

TEST_CASE("oracle marginals are permutation equivariant") {
  Rng rng(11);
  const auto obs = fixtures::random_observations(3, 1, 6, rng);
  const std::vector<std::size_t> perm{2, 0, 1};
  ObservationMatrix y(3, 6);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) y.set(perm[i], perm[j], obs[0].get(i, j));
  }
  const auto a = eval::brute_force_marginals(obs, {});
  const auto b = eval::brute_force_marginals(fixtures::single(y), {});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      for (int c = 0; c < 3; ++c) CHECK(b(perm[i], perm[j])[c] == Approx(a(i, j)[c]).epsilon(1e-9));
    }
  }
}

TEST_CASE("oracle is stable under grid refinement") {
  Rng rng(12);
  for (int rep = 0; rep < 3; ++rep) {
    const auto obs = fixtures::random_observations(3, 1, 8, rng);
    const auto coarse = eval::brute_force_marginals(obs, {}, 20);
    const auto fine = eval::brute_force_marginals(obs, {}, 80);
    CHECK(max_tv(coarse, fine) < 0.01);
  }
}

TEST_CASE("oracle matches plain grid integration") {
  Rng rng(13);
  for (int rep = 0; rep < 3; ++rep) {
    const auto obs = fixtures::random_observations(3, 1, 5, rng);
    const auto exact = eval::brute_force_marginals(obs, {});
    const auto grid = grid_oracle(obs, {}, 60);
    CHECK(max_tv(exact, grid) < 0.01);
  }
  // Two periods and a non-uniform sign prior.
  const auto obs = fixtures::random_observations(3, 2, 4, rng);
  Priors priors;
  priors.rho = {0.2, 0.5, 0.3};
  CHECK(max_tv(eval::brute_force_marginals(obs, priors), grid_oracle(obs, priors, 40)) < 0.01);
}

TEST_CASE("random-scan edge block samples the exact marginals") {
  Rng rng(21);
  const auto obs = fixtures::random_observations(3, 1, 6, rng);
  SamplerConfig cfg;
  cfg.edge_proposals = 2;
  cfg.sweeps = 120000;
  cfg.burn_in = 2000;
  cfg.thin = 2;
  const auto m = edge_marginals(run_chain(obs, cfg, rng));
  CHECK(max_tv(eval::brute_force_marginals(obs, {}), m) < 0.03);
}
