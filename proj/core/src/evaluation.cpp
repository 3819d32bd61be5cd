#include "signet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include <fmt/format.h>

#include "signet/model.hpp"
#include "signet/parallel.hpp"

namespace signet::eval {

double auc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: length mismatch");
  const std::size_t m = scores.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t lo = 0; lo < m;) {
    std::size_t hi = lo;
    while (hi + 1 < m && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + hi) + 1.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (labels[order[k]]) {
        rank_sum += midrank;
        ++positives;
      }
    }
    lo = hi + 1;
  }
  const std::size_t negatives = m - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("AUC undefined: truth contains a single class");
  }
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

double auc_one_vs_rest(std::span<const double> scores, const SignedNetwork& truth, Sign target) {
  if (scores.size() != truth.pair_total()) {
    throw DataError(fmt::format("expected {} scores, got {}", truth.pair_total(), scores.size()));
  }
  const std::size_t m = truth.pair_total();
  auto labels = std::make_unique<bool[]>(m);
  for (std::size_t k = 0; k < m; ++k) labels[k] = truth.at_index(k) == target;
  return auc(scores, std::span<const bool>(labels.get(), m));
}

double discrepancy(const ObservationMatrix& x, const PairMatrix& expected) {
  if (x.n() != expected.n()) throw std::invalid_argument("discrepancy: dimension mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < x.upper().size(); ++k) {
    const int v = x.at_index(k);
    if (v == 0) continue;
    const double e = expected.at_index(k);
    if (e <= 0.0) return std::numeric_limits<double>::infinity();
    d += v * std::log(v / e);
  }
  return d;
}

double bayesian_p_value(std::span<const double> observed, std::span<const double> replicated) {
  if (observed.size() != replicated.size() || observed.empty()) {
    throw std::invalid_argument("p-value needs equal, non-empty discrepancy lists");
  }
  std::size_t above = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (observed[k] < replicated[k]) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(observed.size());
}

PpcResult posterior_predictive(const ObservationSet& obs, const SampleSet& samples, Rng& rng,
                               int workers) {
  if (samples.empty()) throw DataError("posterior predictive check needs at least one draw");
  for (const auto& draw : samples.draws) check_dimensions(draw, obs);
  const std::uint64_t base = rng();
  const std::size_t draws = samples.size();
  PpcResult out;
  out.periods.assign(obs.size(), PpcPeriod{std::vector<double>(draws), std::vector<double>(draws), 0.0});
  parallel_for(draws, workers, [&](std::size_t l) {
    Rng local(derive_seed(base, l));
    const auto& draw = samples.draws[l];
    for (std::size_t s = 0; s < obs.size(); ++s) {
      const auto& p = draw.periods[s];
      const int t = obs[s].trials();
      const PairMatrix e = expected_counts(draw.network, p.partition, p.rates, t);
      const auto rep = sample_observations(draw.network, p.partition, p.rates, t, local);
      out.periods[s].observed[l] = discrepancy(obs[s], e);
      out.periods[s].replicated[l] = discrepancy(rep, e);
    }
  });
  for (auto& p : out.periods) p.p_value = bayesian_p_value(p.observed, p.replicated);
  return out;
}

FriendshipReport friendship_comparison(
    std::span<const PairMatrix> daily_means, std::span<const std::vector<bool>> present,
    const std::vector<std::pair<std::string, std::vector<NodePair>>>& groups, int bins) {
  if (daily_means.empty()) throw DataError("friendship comparison needs at least one day");
  if (!present.empty() && present.size() != daily_means.size()) {
    throw DataError("presence masks must match the number of days");
  }
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  const std::size_t n = daily_means.front().n();
  for (const auto& m : daily_means) {
    if (m.n() != n) throw DataError("daily mean matrices disagree on node count");
  }
  FriendshipReport report;
  for (int b = 0; b <= bins; ++b) report.bin_edges.push_back(-1.0 + 2.0 * b / bins);

  for (const auto& [name, pairs] : groups) {
    if (pairs.empty()) throw DataError(fmt::format("pair set '{}' is empty", name));
    GroupSummary g;
    g.name = name;
    g.histogram.assign(static_cast<std::size_t>(bins), 0);
    for (const auto& pr : pairs) {
      if (pr.i >= n || pr.j >= n || pr.i == pr.j) {
        throw DataError(fmt::format("pair ({}, {}) in '{}' outside node range", pr.i, pr.j, name));
      }
      double sum = 0.0;
      int days = 0;
      for (std::size_t d = 0; d < daily_means.size(); ++d) {
        if (!present.empty() && !(present[d][pr.i] && present[d][pr.j])) continue;
        sum += daily_means[d](pr.i, pr.j);
        ++days;
      }
      if (days == 0) {
        ++g.skipped;
        continue;
      }
      const double v = sum / days;
      g.values.push_back(v);
      const auto bin = std::clamp(static_cast<int>(std::floor((v + 1.0) / 2.0 * bins)), 0, bins - 1);
      ++g.histogram[static_cast<std::size_t>(bin)];
    }
    if (!g.values.empty()) {
      g.mean = std::accumulate(g.values.begin(), g.values.end(), 0.0) /
               static_cast<double>(g.values.size());
    }
    report.groups.push_back(std::move(g));
  }
  return report;
}

}  // namespace signet::eval
