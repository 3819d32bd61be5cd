#include "signet/synthetic.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "signet/model.hpp"

namespace signet::synth {

namespace {

void check_range(const Range& r, const char* name) {
  if (!(0.0 <= r.lo && r.lo <= r.hi && r.hi <= 1.0)) {
    throw ConfigError(fmt::format("{} range [{}, {}] must lie within [0, 1]", name, r.lo, r.hi));
  }
}

/// Uniform on (lo, hi), excluding the endpoints 0 and 1.
double draw_open(const Range& r, Rng& rng) {
  for (;;) {
    const double v = r.lo + (r.hi - r.lo) * uniform01(rng);
    if (v > 0.0 && v < 1.0) return v;
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (!(edge_density >= 0.0 && edge_density <= 1.0)) {
    throw ConfigError(fmt::format("edge density {} outside [0, 1]", edge_density));
  }
  if (max_groups < 1 || static_cast<std::size_t>(max_groups) > n) {
    throw ConfigError(fmt::format("max_groups {} outside [1, n]", max_groups));
  }
  if (groups && (*groups < 1 || static_cast<std::size_t>(*groups) > n)) {
    throw ConfigError(fmt::format("groups {} outside [1, n]", *groups));
  }
  check_range(p_pos, "p_pos");
  check_range(p_zero, "p_zero");
  check_range(p_neg, "p_neg");
  check_range(q, "q");
  if (!(p_neg.hi <= p_zero.lo && p_zero.hi <= p_pos.lo)) {
    throw ConfigError("rate ranges must be ordered p_neg < p_zero < p_pos");
  }
  if (p_neg.lo == p_neg.hi && p_neg.lo == p_zero.lo) {
    throw ConfigError("p_neg and p_zero ranges leave no strictly ordered draw");
  }
  if (trials < 0) throw ConfigError("trials must be non-negative");
  if (periods < 1) throw ConfigError("periods must be positive");
}

SignedNetwork generate_signed_er(const SynthConfig& config, Rng& rng) {
  SignedNetwork net(config.n);
  for (std::size_t k = 0; k < net.pair_total(); ++k) {
    if (uniform01(rng) < config.edge_density) {
      net.set_at_index(k, uniform01(rng) < 0.5 ? Sign::positive : Sign::negative);
    }
  }
  return net;
}

Partition generate_partition_with_groups(std::size_t n, int groups, Rng& rng) {
  if (groups < 1 || static_cast<std::size_t>(groups) > n) {
    throw ConfigError(fmt::format("cannot split {} nodes into {} non-empty groups", n, groups));
  }
  std::uniform_int_distribution<int> pick(0, groups - 1);
  std::vector<int> labels(n);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(groups));
  for (;;) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (auto& l : labels) {
      l = pick(rng);
      ++sizes[static_cast<std::size_t>(l)];
    }
    if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end()) break;
  }
  return Partition::from_labels(labels);
}

Partition generate_partition(std::size_t n, int max_groups, Rng& rng) {
  if (max_groups < 1 || static_cast<std::size_t>(max_groups) > n) {
    throw ConfigError(fmt::format("max_groups {} outside [1, {}]", max_groups, n));
  }
  std::uniform_int_distribution<int> count(1, max_groups);
  return generate_partition_with_groups(n, count(rng), rng);
}

RateParams generate_rates(const SynthConfig& config, Rng& rng) {
  RateParams r;
  do {
    r.p_pos = draw_open(config.p_pos, rng);
    r.p_zero = draw_open(config.p_zero, rng);
    r.p_neg = draw_open(config.p_neg, rng);
    r.q = draw_open(config.q, rng);
  } while (!r.valid());
  return r;
}

Instance generate_instance(const SynthConfig& config, Rng& rng) {
  config.validate();
  Instance out;
  out.network = generate_signed_er(config, rng);
  std::vector<ObservationMatrix> mats;
  for (int s = 0; s < config.periods; ++s) {
    PeriodState p;
    p.partition = config.groups ? generate_partition_with_groups(config.n, *config.groups, rng)
                                : generate_partition(config.n, config.max_groups, rng);
    p.rates = generate_rates(config, rng);
    mats.push_back(sample_observations(out.network, p.partition, p.rates, config.trials, rng));
    out.periods.push_back(std::move(p));
  }
  out.observations = ObservationSet(std::move(mats));
  return out;
}

Instance generate_instance(const SynthConfig& config) {
  Rng rng(config.seed);
  return generate_instance(config, rng);
}

double internal_edge_fraction(const SignedNetwork& net, const Partition& g) {
  long edges = 0;
  long internal = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < net.n(); ++i) {
    for (std::size_t j = i + 1; j < net.n(); ++j, ++k) {
      if (net.at_index(k) == Sign::absent) continue;
      ++edges;
      if (g.same_group(i, j)) ++internal;
    }
  }
  return edges ? static_cast<double>(internal) / static_cast<double>(edges) : 0.0;
}

}  // namespace signet::synth
