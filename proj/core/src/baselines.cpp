#include "signet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

namespace signet::baselines {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinProb = 1e-300;
constexpr double kMinLogGap = -30.0;
constexpr double kMaxLogGap = 10.0;

double norm_cdf(double z) {
  if (z == kInf) return 1.0;
  if (z == -kInf) return 0.0;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double norm_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

/// Bounds (lower, upper) of class s on the latent scale.
std::pair<double, double> class_bounds(const ProbitModel& m, Sign s) {
  switch (s) {
    case Sign::negative: return {-kInf, m.tau1};
    case Sign::absent: return {m.tau1, m.tau2};
    case Sign::positive: return {m.tau2, kInf};
  }
  return {-kInf, kInf};
}

double class_probability(double lo, double hi) {
  // Evaluate in whichever tail keeps the difference accurate.
  if (lo > 0.0) return norm_cdf(-lo) - norm_cdf(-hi);
  return norm_cdf(hi) - norm_cdf(lo);
}

using Theta = std::array<double, 3>;  // beta, tau1, log(tau2 - tau1)

ProbitModel to_model(const Theta& th) {
  return {th[0], th[1], th[1] + std::exp(th[2])};
}

Theta to_theta(const ProbitModel& m) {
  return {m.beta, m.tau1, std::log(m.tau2 - m.tau1)};
}

struct Objective {
  std::span<const double> x;
  std::span<const Sign> y;

  double value(const Theta& th) const { return probit_log_likelihood(to_model(th), x, y); }

  Theta gradient(const Theta& th) const {
    const ProbitModel m = to_model(th);
    double g_beta = 0.0, g_tau1 = 0.0, g_tau2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto [lo, hi] = class_bounds(m, y[k]);
      const double mu = m.beta * x[k];
      const double a = lo - mu;
      const double b = hi - mu;
      const double p = std::max(class_probability(a, b), kMinProb);
      const double fa = norm_pdf(a);
      const double fb = norm_pdf(b);
      g_beta += -x[k] * (fb - fa) / p;
      switch (y[k]) {
        case Sign::negative: g_tau1 += fb / p; break;
        case Sign::absent:
          g_tau1 -= fa / p;
          g_tau2 += fb / p;
          break;
        case Sign::positive: g_tau2 -= fa / p; break;
      }
    }
    return {g_beta, g_tau1 + g_tau2, g_tau2 * std::exp(th[2])};
  }
};

/// Solves (-H + lambda I) d = g for the smallest lambda that makes the
/// matrix positive definite; returns false if none is found.
bool damped_newton_direction(const std::array<Theta, 3>& hess, const Theta& g, Theta& dir) {
  double lambda = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    double a[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] = -0.5 * (hess[r][c] + hess[c][r]);
      a[r][r] += lambda;
    }
    // Cholesky.
    double l[3][3] = {};
    bool ok = true;
    for (int r = 0; r < 3 && ok; ++r) {
      for (int c = 0; c <= r; ++c) {
        double s = a[r][c];
        for (int k = 0; k < c; ++k) s -= l[r][k] * l[c][k];
        if (r == c) {
          if (!(s > 0.0) || !std::isfinite(s)) {
            ok = false;
            break;
          }
          l[r][r] = std::sqrt(s);
        } else {
          l[r][c] = s / l[c][c];
        }
      }
    }
    if (ok) {
      double z[3];
      for (int r = 0; r < 3; ++r) {
        double s = g[static_cast<std::size_t>(r)];
        for (int k = 0; k < r; ++k) s -= l[r][k] * z[k];
        z[r] = s / l[r][r];
      }
      for (int r = 2; r >= 0; --r) {
        double s = z[r];
        for (int k = r + 1; k < 3; ++k) s -= l[k][r] * dir[static_cast<std::size_t>(k)];
        dir[static_cast<std::size_t>(r)] = s / l[r][r];
      }
      return true;
    }
    lambda = lambda == 0.0 ? 1e-8 : lambda * 10.0;
  }
  return false;
}

ProbitModel initial_model(std::span<const Sign> y) {
  std::array<double, 3> freq{};
  for (Sign s : y) freq[static_cast<std::size_t>(sign_index(s))] += 1.0;
  const double total = static_cast<double>(y.size());
  const boost::math::normal_distribution<> std_normal;
  const auto quantile = [&](double p) {
    return boost::math::quantile(std_normal, std::clamp(p, 1e-6, 1.0 - 1e-6));
  };
  ProbitModel m;
  m.beta = 0.0;
  m.tau1 = quantile(freq[0] / total);
  m.tau2 = std::max(quantile((freq[0] + freq[1]) / total), m.tau1 + 1e-3);
  return m;
}

}  // namespace

std::string to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::iteration_cap: return "iteration_cap";
    case FitStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

RevealMask draw_reveal_mask(std::size_t n, double omega, Rng& rng) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw ConfigError(fmt::format("reveal fraction {} outside [0, 1]", omega));
  }
  RevealMask mask;
  mask.n = n;
  mask.omega = omega;
  const std::size_t total = pair_count(n);
  const auto size = static_cast<std::size_t>(std::llround(omega * static_cast<double>(total)));
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t k = 0; k < size; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, total - 1);
    std::swap(all[k], all[pick(rng)]);
  }
  mask.pairs.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
  std::sort(mask.pairs.begin(), mask.pairs.end());
  return mask;
}

double probit_log_likelihood(const ProbitModel& m, std::span<const double> x,
                             std::span<const Sign> y) {
  if (x.size() != y.size()) throw std::invalid_argument("probit: x and y lengths differ");
  double ll = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto [lo, hi] = class_bounds(m, y[k]);
    const double mu = m.beta * x[k];
    ll += std::log(std::max(class_probability(lo - mu, hi - mu), kMinProb));
  }
  return ll;
}

ProbitFit fit_ordered_probit(std::span<const double> x, std::span<const Sign> y,
                             const ProbitOptions& options) {
  if (x.size() != y.size()) throw std::invalid_argument("probit: x and y lengths differ");
  if (x.empty()) throw DataError("probit: no revealed pairs");
  ProbitFit fit;
  const bool single_class =
      std::all_of(y.begin(), y.end(), [&](Sign s) { return s == y.front(); });
  if (single_class) {
    // Boundary fit: the observed class takes essentially all the mass.
    switch (y.front()) {
      case Sign::negative: fit.model = {0.0, 8.0, 9.0}; break;
      case Sign::absent: fit.model = {0.0, -8.0, 8.0}; break;
      case Sign::positive: fit.model = {0.0, -9.0, -8.0}; break;
    }
    fit.status = FitStatus::degenerate;
    fit.initial_log_likelihood = fit.log_likelihood = probit_log_likelihood(fit.model, x, y);
    return fit;
  }

  const Objective f{x, y};
  Theta th = to_theta(initial_model(y));
  double ll = f.value(th);
  fit.initial_log_likelihood = ll;
  fit.status = FitStatus::iteration_cap;

  for (int it = 1; it <= options.max_iterations; ++it) {
    fit.iterations = it;
    const Theta g = f.gradient(th);
    std::array<Theta, 3> hess{};
    for (std::size_t c = 0; c < 3; ++c) {
      const double h = 1e-5 * std::max(1.0, std::abs(th[c]));
      Theta up = th, down = th;
      up[c] += h;
      down[c] -= h;
      const Theta gu = f.gradient(up);
      const Theta gd = f.gradient(down);
      for (std::size_t r = 0; r < 3; ++r) hess[r][c] = (gu[r] - gd[r]) / (2.0 * h);
    }
    Theta dir = g;
    if (!damped_newton_direction(hess, g, dir)) dir = g;

    double step = 1.0;
    Theta next = th;
    double next_ll = ll;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t c = 0; c < 3; ++c) next[c] = th[c] + step * dir[c];
      next[2] = std::clamp(next[2], kMinLogGap, kMaxLogGap);
      next_ll = f.value(next);
      if (std::isfinite(next_ll) && next_ll >= ll) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      fit.status = FitStatus::converged;
      break;
    }
    const double gain = next_ll - ll;
    th = next;
    ll = next_ll;
    if (gain < options.tolerance) {
      fit.status = FitStatus::converged;
      break;
    }
  }
  fit.model = to_model(th);
  fit.log_likelihood = ll;
  return fit;
}

ProbitFit fit_ordered_probit(const ObservationMatrix& obs, const SignedNetwork& truth,
                             const RevealMask& mask, const ProbitOptions& options) {
  if (truth.n() != obs.n() || mask.n != obs.n()) {
    throw std::invalid_argument("probit: observation, truth and mask sizes differ");
  }
  std::vector<double> x;
  std::vector<Sign> y;
  x.reserve(mask.pairs.size());
  y.reserve(mask.pairs.size());
  for (std::size_t k : mask.pairs) {
    if (k >= obs.upper().size()) throw DataError("reveal mask pair out of range");
    x.push_back(obs.at_index(k));
    y.push_back(truth.at_index(k));
  }
  return fit_ordered_probit(x, y, options);
}

ClassProbabilities probit_classify(const ProbitModel& m, double x) {
  const double mu = m.beta * x;
  ClassProbabilities out;
  for (Sign s : kAllSigns) {
    const auto [lo, hi] = class_bounds(m, s);
    out.probs[static_cast<std::size_t>(sign_index(s))] = class_probability(lo - mu, hi - mu);
  }
  out.label = mu < m.tau1 ? Sign::negative : (mu < m.tau2 ? Sign::absent : Sign::positive);
  return out;
}

std::vector<ClassProbabilities> probit_scores(const ProbitModel& m, const ObservationMatrix& obs) {
  std::vector<ClassProbabilities> out;
  out.reserve(obs.upper().size());
  for (int x : obs.upper()) out.push_back(probit_classify(m, x));
  return out;
}

PairMatrix cm_residuals(const ObservationMatrix& obs, CmNormalization norm) {
  const std::size_t n = obs.n();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(obs.row_total(i));
  double denom = 0.0;
  for (double v : d) denom += norm == CmNormalization::printed ? v * v : v;
  if (denom == 0.0) throw DataError("configuration model undefined for an all-zero matrix");
  const double scale = norm == CmNormalization::printed ? 0.5 / denom : 1.0 / denom;
  PairMatrix out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      out.at_index(k) = obs.at_index(k) - scale * d[i] * d[j];
    }
  }
  return out;
}

SignedNetwork cm_classify(const PairMatrix& residuals) {
  SignedNetwork out(residuals.n());
  for (std::size_t k = 0; k < out.pair_total(); ++k) {
    out.set_at_index(k, residuals.at_index(k) > 0.0 ? Sign::positive : Sign::negative);
  }
  return out;
}

}  // namespace signet::baselines
