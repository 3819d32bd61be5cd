#include "signet/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace signet {

Sign sign_from_value(int v) {
  if (v < -1 || v > 1) throw DataError(fmt::format("sign value {} not in {{-1, 0, 1}}", v));
  return static_cast<Sign>(v);
}

char sign_char(Sign s) {
  switch (s) {
    case Sign::negative: return '-';
    case Sign::absent: return '0';
    case Sign::positive: return '+';
  }
  return '0';
}

Sign sign_from_char(char c) {
  switch (c) {
    case '-': return Sign::negative;
    case '0': return Sign::absent;
    case '+': return Sign::positive;
    default: throw DataError(fmt::format("invalid sign character '{}'", c));
  }
}

NodePair pair_from_index(std::size_t k, std::size_t n) {
  // Row i holds n - i - 1 pairs.
  std::size_t i = 0;
  std::size_t row = n - 1;
  while (k >= row) {
    k -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + k};
}

Partition Partition::single_group(std::size_t n) {
  Partition p;
  p.labels_.assign(n, 0);
  if (n > 0) p.sizes_.assign(1, n);
  return p;
}

Partition Partition::singletons(std::size_t n) {
  Partition p;
  p.labels_.resize(n);
  std::iota(p.labels_.begin(), p.labels_.end(), 0);
  p.sizes_.assign(n, 1);
  return p;
}

Partition Partition::from_labels(std::span<const int> labels) {
  std::map<int, int> remap;
  for (int l : labels) {
    if (l < 0) throw DataError(fmt::format("negative group label {}", l));
    remap.emplace(l, 0);
  }
  int next = 0;
  for (auto& [from, to] : remap) to = next++;
  Partition p;
  p.labels_.reserve(labels.size());
  p.sizes_.assign(remap.size(), 0);
  for (int l : labels) {
    const int c = remap[l];
    p.labels_.push_back(c);
    ++p.sizes_[static_cast<std::size_t>(c)];
  }
  return p;
}

int Partition::move(std::size_t node, int target) {
  const int gamma = static_cast<int>(sizes_.size());
  if (target < 0 || target > gamma) {
    throw std::out_of_range(fmt::format("group {} outside 0..{}", target, gamma));
  }
  const int from = labels_[node];
  if (target == from) return from;
  if (target == gamma) {
    // A singleton opening a new group is the same set partition.
    if (sizes_[static_cast<std::size_t>(from)] == 1) return from;
    sizes_.push_back(0);
  }
  --sizes_[static_cast<std::size_t>(from)];
  ++sizes_[static_cast<std::size_t>(target)];
  labels_[node] = target;
  if (sizes_[static_cast<std::size_t>(from)] == 0) {
    sizes_.erase(sizes_.begin() + from);
    for (int& l : labels_) {
      if (l > from) --l;
    }
  }
  return labels_[node];
}

ObservationMatrix::ObservationMatrix(std::size_t n, int trials)
    : n_(n), trials_(trials), counts_(pair_count(n), 0) {
  if (trials < 0) throw DataError(fmt::format("negative trial count {}", trials));
}

void ObservationMatrix::set(std::size_t i, std::size_t j, int count) {
  if (i == j || i >= n_ || j >= n_) {
    throw DataError(fmt::format("invalid pair ({}, {}) for n={}", i, j, n_));
  }
  set_at_index(pair_index(i, j, n_), count);
}

void ObservationMatrix::set_at_index(std::size_t k, int count) {
  if (count < 0 || count > trials_) {
    throw DataError(fmt::format("count {} outside [0, {}]", count, trials_));
  }
  counts_[k] = count;
}

long ObservationMatrix::row_total(std::size_t node) const {
  long total = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (j != node) total += get(node, j);
  }
  return total;
}

ObservationSet::ObservationSet(std::vector<ObservationMatrix> periods)
    : periods_(std::move(periods)) {
  if (periods_.empty()) throw DataError("observation set needs at least one period");
  const std::size_t n = periods_.front().n();
  for (const auto& p : periods_) {
    if (p.n() != n) {
      throw DataError(fmt::format("period node count {} differs from {}", p.n(), n));
    }
  }
}

void Priors::validate() const {
  double total = 0.0;
  for (double r : rho) {
    if (!(r >= 0.0)) throw ConfigError("sign prior entries must be non-negative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError(fmt::format("sign prior sums to {}, expected 1", total));
  }
}

double Priors::log_rho(Sign s) const {
  return std::log(rho[static_cast<std::size_t>(sign_index(s))]);
}

}  // namespace signet
