#pragma once

#include <array>
#include <string>
#include <vector>

#include "signet/random.hpp"
#include "signet/types.hpp"

namespace signet::baselines {

/// Pairs whose true signs are revealed to a supervised method, as upper-triangle indices.
struct RevealMask {
  std::size_t n = 0;
  double omega = 0.0;
  std::vector<std::size_t> pairs;
};

/// round(omega * C(n,2)) distinct pairs, uniformly without replacement, sorted.
RevealMask draw_reveal_mask(std::size_t n, double omega, Rng& rng);

struct ProbitModel {
  double beta = 0.0;
  double tau1 = -0.5;
  double tau2 = 0.5;
};

enum class FitStatus { converged, iteration_cap, degenerate };
std::string to_string(FitStatus s);

struct ProbitFit {
  ProbitModel model;
  FitStatus status = FitStatus::converged;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;
  int iterations = 0;
};

struct ProbitOptions {
  double tolerance = 1e-8;
  int max_iterations = 10000;
};

/// Ordered-probit log-likelihood of labelled (count, sign) examples.
double probit_log_likelihood(const ProbitModel& m, std::span<const double> x,
                             std::span<const Sign> y);

/// Maximum likelihood on parallel (count, sign) vectors.
ProbitFit fit_ordered_probit(std::span<const double> x, std::span<const Sign> y,
                             const ProbitOptions& options = {});
/// Maximum likelihood on the revealed pairs of an observation matrix.
ProbitFit fit_ordered_probit(const ObservationMatrix& obs, const SignedNetwork& truth,
                             const RevealMask& mask, const ProbitOptions& options = {});

struct ClassProbabilities {
  std::array<double, 3> probs{};  // (negative, absent, positive)
  Sign label = Sign::absent;
};

/// Class probabilities and threshold label for a latent mean beta * x.
ClassProbabilities probit_classify(const ProbitModel& m, double x);

/// One entry per unordered pair, in upper-triangle order.
std::vector<ClassProbabilities> probit_scores(const ProbitModel& m, const ObservationMatrix& obs);

enum class CmNormalization {
  printed,   // 1/2 d_i d_j / sum_k d_k^2
  standard,  // d_i d_j / sum_k d_k
};

/// X - <X> under the configuration-model expectation. Throws DataError for all-zero X.
PairMatrix cm_residuals(const ObservationMatrix& obs,
                        CmNormalization norm = CmNormalization::printed);

/// +1 where the residual is positive, -1 otherwise.
SignedNetwork cm_classify(const PairMatrix& residuals);

}  // namespace signet::baselines
