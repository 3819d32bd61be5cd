#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "signet/estimation.hpp"
#include "signet/random.hpp"
#include "signet/sampler.hpp"
#include "signet/types.hpp"

namespace signet::eval {

/// Area under the ROC curve of `scores` for binary labels, ties at midrank.
/// Throws DataError when either class is empty.
double auc(std::span<const double> scores, std::span<const bool> labels);

/// One-vs-rest AUC for `target` with one score per pair in upper-triangle order.
double auc_one_vs_rest(std::span<const double> scores, const SignedNetwork& truth, Sign target);

/// sum_{i<j} X_ij log(X_ij / E_ij), zero terms where X_ij = 0. Returns +inf
/// when some X_ij > 0 has E_ij = 0.
double discrepancy(const ObservationMatrix& x, const PairMatrix& expected);

struct PpcPeriod {
  std::vector<double> observed;
  std::vector<double> replicated;
  double p_value = 0.0;
};

struct PpcResult {
  std::vector<PpcPeriod> periods;
};

/// Fraction of paired draws whose replicated discrepancy exceeds the observed one.
double bayesian_p_value(std::span<const double> observed, std::span<const double> replicated);

/// Paired posterior predictive check. Draw l uses its own random stream
/// derived from one value taken from `rng`, so results do not depend on `workers`.
PpcResult posterior_predictive(const ObservationSet& obs, const SampleSet& samples, Rng& rng,
                               int workers = 1);

struct GroupSummary {
  std::string name;
  /// Day-averaged posterior mean per pair (pairs never co-present are skipped).
  std::vector<double> values;
  std::size_t skipped = 0;
  double mean = 0.0;
  std::vector<std::size_t> histogram;
};

struct FriendshipReport {
  std::vector<double> bin_edges;
  std::vector<GroupSummary> groups;
};

/// For each named pair set, averages the posterior mean of every pair over the
/// days where both nodes are present (`present[d][i]`; an empty `present`
/// means everyone, every day) and bins the averages over [-1, 1].
FriendshipReport friendship_comparison(
    std::span<const PairMatrix> daily_means, std::span<const std::vector<bool>> present,
    const std::vector<std::pair<std::string, std::vector<NodePair>>>& groups, int bins = 20);

/// Exact posterior edge marginals for tiny instances (n <= 4) by enumerating
/// every network and partition. The rate triple is integrated over the ordered
/// region with `grid_resolution` cells on the middle rate (7-point
/// Gauss-Legendre per cell, outer rates integrated in closed form); q is
/// integrated in closed form.
EdgeMarginals brute_force_marginals(const ObservationSet& obs, const Priors& priors,
                                    int grid_resolution = 20);

/// All set partitions of n nodes as restricted growth strings.
std::vector<Partition> enumerate_partitions(std::size_t n);

}  // namespace signet::eval
