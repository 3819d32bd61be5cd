#include <doctest.h>

#include <cmath>
#include <map>
#include <queue>

#include "fixtures.hpp"
#include "signet/evaluation.hpp"
#include "signet/sampler.hpp"

using namespace signet;

namespace {

// Canonical key: network code and first-appearance relabelling of the partition.
std::string state_key(const ModelState& st) {
  std::string key;
  for (Sign s : st.network.upper()) key.push_back(sign_char(s));
  key.push_back('|');
  std::map<int, int> relabel;
  for (int l : st.periods[0].partition.labels()) {
    const auto [it, fresh] = relabel.emplace(l, static_cast<int>(relabel.size()));
    key.push_back(static_cast<char>('a' + it->second));
  }
  return key;
}

struct Space {
  std::vector<ModelState> states;
  std::map<std::string, std::size_t> index;
};

Space enumerate_space(std::size_t n, const RateParams& rates) {
  Space sp;
  const auto parts = eval::enumerate_partitions(n);
  std::size_t networks = 1;
  for (std::size_t k = 0; k < pair_count(n); ++k) networks *= 3;
  for (std::size_t a = 0; a < networks; ++a) {
    SignedNetwork net(n);
    std::size_t code = a;
    for (std::size_t k = 0; k < net.pair_total(); ++k, code /= 3) {
      net.set_at_index(k, sign_from_index(static_cast<int>(code % 3)));
    }
    for (const auto& g : parts) {
      ModelState st;
      st.network = net;
      st.periods.push_back({g, rates});
      sp.index[state_key(st)] = sp.states.size();
      sp.states.push_back(st);
    }
  }
  return sp;
}

using Kernel = std::map<std::pair<std::size_t, std::size_t>, double>;

}  // namespace

TEST_CASE("per-block kernels satisfy detailed balance and connect the space (n=3)") {
  const std::size_t n = 3;
  const RateParams rates{0.2, 0.5, 0.8, 0.1};
  ObservationMatrix x(n, 6);
  x.set(0, 1, 5);
  x.set(0, 2, 1);
  x.set(1, 2, 3);
  const auto obs = fixtures::single(x);
  SamplerConfig cfg;
  cfg.freeze_rates = true;
  cfg.initial_rates = rates;
  const Space sp = enumerate_space(n, rates);
  REQUIRE(sp.states.size() == 27 * 5);

  std::vector<double> logf;
  for (const auto& st : sp.states) logf.push_back(log_posterior(st, obs, cfg.priors));

  std::vector<Kernel> kernels;
  // One kernel per pair (edge flip) and per node (partition move).
  for (std::size_t k = 0; k < pair_count(n); ++k) {
    Kernel kern;
    for (std::size_t xi = 0; xi < sp.states.size(); ++xi) {
      Chain chain(obs, cfg, sp.states[xi], Rng(1));
      const Sign cur = sp.states[xi].network.at_index(k);
      for (Sign s : kAllSigns) {
        if (s == cur) continue;
        ModelState y = sp.states[xi];
        y.network.set_at_index(k, s);
        const double a = std::min(1.0, std::exp(chain.edge_flip_log_ratio(k, s)));
        kern[{xi, sp.index.at(state_key(y))}] += 0.5 * a;
      }
    }
    kernels.push_back(kern);
  }
  for (std::size_t node = 0; node < n; ++node) {
    Kernel kern;
    for (std::size_t xi = 0; xi < sp.states.size(); ++xi) {
      Chain chain(obs, cfg, sp.states[xi], Rng(1));
      const auto dist = partition_proposal_distribution(sp.states[xi], obs, 0, node);
      for (std::size_t target = 0; target < dist.size(); ++target) {
        ModelState y = sp.states[xi];
        y.periods[0].partition.move(node, static_cast<int>(target));
        const std::size_t yi = sp.index.at(state_key(y));
        if (yi == xi) continue;
        const double a =
            std::min(1.0, std::exp(chain.partition_move_log_ratio(0, node, static_cast<int>(target))));
        kern[{xi, yi}] += dist[target] * a;
      }
    }
    kernels.push_back(kern);
  }

  for (const auto& kern : kernels) {
    for (const auto& [edge, p] : kern) {
      const auto [xi, yi] = edge;
      const auto back = kern.find({yi, xi});
      REQUIRE(back != kern.end());
      const double lhs = logf[xi] + std::log(p);
      const double rhs = logf[yi] + std::log(back->second);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }

  // Reachability over the union of all kernels.
  std::vector<std::vector<std::size_t>> adj(sp.states.size());
  for (const auto& kern : kernels) {
    for (const auto& [edge, p] : kern) {
      if (p > 0.0) adj[edge.first].push_back(edge.second);
    }
  }
  for (std::size_t start = 0; start < sp.states.size(); ++start) {
    std::vector<bool> seen(sp.states.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(start);
    seen[start] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const auto cur = frontier.front();
      frontier.pop();
      for (auto nxt : adj[cur]) {
        if (!seen[nxt]) {
          seen[nxt] = true;
          ++reached;
          frontier.push(nxt);
        }
      }
    }
    CHECK(reached == sp.states.size());
  }
}
