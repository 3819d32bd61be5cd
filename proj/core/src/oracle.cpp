#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>

#include "signet/evaluation.hpp"

namespace signet::eval {

namespace {

constexpr std::size_t kMaxNodes = 4;

double log_sum_exp(std::span<const double> v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// (successes, failures) per class: negative, absent, positive intra, then cross.
using ClassStats = std::array<long, 8>;

class RateIntegral {
 public:
  explicit RateIntegral(int cells) : cells_(cells) {
    using Rule = boost::math::quadrature::gauss<double, 7>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    const double h = 1.0 / cells;
    for (int c = 0; c < cells; ++c) {
      const double mid = (c + 0.5) * h;
      for (std::size_t k = 0; k < x.size(); ++k) {
        nodes_.push_back(mid + 0.5 * h * x[k]);
        log_weights_.push_back(std::log(0.5 * h * w[k]));
        if (x[k] != 0.0) {
          nodes_.push_back(mid - 0.5 * h * x[k]);
          log_weights_.push_back(std::log(0.5 * h * w[k]));
        }
      }
    }
  }

  /// log of the integral of the rate likelihood over the ordered region for
  /// the intra triple times the full unit interval for q.
  double log_integral(const ClassStats& st) {
    const auto it = cache_.find(st);
    if (it != cache_.end()) return it->second;
    const double a1 = st[0] + 1.0, b1 = st[1] + 1.0;
    const double s2 = static_cast<double>(st[2]), f2 = static_cast<double>(st[3]);
    const double a3 = st[4] + 1.0, b3 = st[5] + 1.0;
    std::vector<double> terms(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const double p = nodes_[k];
      const double below = boost::math::ibeta(a1, b1, p);
      const double above = boost::math::ibetac(a3, b3, p);
      terms[k] = (below > 0.0 && above > 0.0)
                     ? log_weights_[k] + s2 * std::log(p) + f2 * std::log1p(-p) +
                           std::log(below) + std::log(above)
                     : kNegInf;
    }
    const double value = log_beta_fn(a1, b1) + log_beta_fn(a3, b3) + log_sum_exp(terms) +
                         log_beta_fn(st[6] + 1.0, st[7] + 1.0);
    cache_.emplace(st, value);
    return value;
  }

 private:
  int cells_;
  std::vector<double> nodes_;
  std::vector<double> log_weights_;
  std::map<ClassStats, double> cache_;
};

void restricted_growth(std::size_t n, std::vector<int>& labels, std::size_t pos, int max_label,
                       std::vector<Partition>& out) {
  if (pos == n) {
    out.push_back(Partition::from_labels(labels));
    return;
  }
  for (int l = 0; l <= max_label + 1; ++l) {
    labels[pos] = l;
    restricted_growth(n, labels, pos + 1, std::max(max_label, l), out);
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(std::size_t n) {
  std::vector<Partition> out;
  if (n == 0) return out;
  std::vector<int> labels(n, 0);
  restricted_growth(n, labels, 1, 0, out);
  return out;
}

EdgeMarginals brute_force_marginals(const ObservationSet& obs, const Priors& priors,
                                    int grid_resolution) {
  priors.validate();
  const std::size_t n = obs.n();
  if (n > kMaxNodes) {
    throw DataError(fmt::format("exact enumeration limited to {} nodes, got {}", kMaxNodes, n));
  }
  if (grid_resolution < 1) throw ConfigError("grid resolution must be positive");
  const std::size_t pairs = pair_count(n);
  std::size_t networks = 1;
  for (std::size_t k = 0; k < pairs; ++k) networks *= 3;

  const auto partitions = enumerate_partitions(n);
  RateIntegral integral(grid_resolution);
  std::vector<double> log_weight(networks, 0.0);
  std::vector<Sign> signs(pairs);
  std::vector<double> per_partition(partitions.size());

  for (std::size_t a = 0; a < networks; ++a) {
    std::size_t code = a;
    double lw = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      signs[k] = sign_from_index(static_cast<int>(code % 3));
      code /= 3;
      lw += priors.log_rho(signs[k]);
    }
    for (std::size_t s = 0; s < obs.size(); ++s) {
      const auto& x = obs[s];
      const long t = x.trials();
      for (std::size_t gi = 0; gi < partitions.size(); ++gi) {
        ClassStats st{};
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j, ++k) {
            const std::size_t c = partitions[gi].same_group(i, j)
                                      ? static_cast<std::size_t>(sign_index(signs[k]))
                                      : 3;
            st[2 * c] += x.at_index(k);
            st[2 * c + 1] += t - x.at_index(k);
          }
        }
        per_partition[gi] = integral.log_integral(st);
      }
      lw += log_sum_exp(per_partition);
    }
    log_weight[a] = lw;
  }

  const double total = log_sum_exp(log_weight);
  EdgeMarginals m(n);
  for (std::size_t a = 0; a < networks; ++a) {
    const double w = std::exp(log_weight[a] - total);
    std::size_t code = a;
    for (std::size_t k = 0; k < pairs; ++k) {
      m.at_index(k)[code % 3] += w;
      code /= 3;
    }
  }
  return m;
}

}  // namespace signet::eval
