#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace signet {

/// Malformed or inconsistent input data (files, streams, matrices).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Sign : std::int8_t { negative = -1, absent = 0, positive = 1 };

inline constexpr std::array<Sign, 3> kAllSigns{Sign::negative, Sign::absent,
                                               Sign::positive};

/// Position of a sign in (negative, absent, positive) ordered arrays.
constexpr int sign_index(Sign s) { return static_cast<int>(s) + 1; }
constexpr Sign sign_from_index(int k) { return static_cast<Sign>(k - 1); }
constexpr int sign_value(Sign s) { return static_cast<int>(s); }
Sign sign_from_value(int v);
char sign_char(Sign s);
Sign sign_from_char(char c);

struct NodePair {
  std::size_t i = 0;
  std::size_t j = 0;
  bool operator==(const NodePair&) const = default;
  auto operator<=>(const NodePair&) const = default;
};

constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Row-major index of the unordered pair {i, j} in the strict upper triangle.
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

NodePair pair_from_index(std::size_t k, std::size_t n);

/// Symmetric real matrix with an unused diagonal, stored over the upper triangle.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(std::size_t n, double fill = 0.0)
      : n_(n), values_(pair_count(n), fill) {}

  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[pair_index(i, j, n_)];
  }
  double& operator()(std::size_t i, std::size_t j) { return values_[pair_index(i, j, n_)]; }
  double at_index(std::size_t k) const { return values_[k]; }
  double& at_index(std::size_t k) { return values_[k]; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Latent signed network: a symmetric matrix with entries in {-1, 0, +1}.
class SignedNetwork {
 public:
  SignedNetwork() = default;
  explicit SignedNetwork(std::size_t n) : n_(n), signs_(pair_count(n), Sign::absent) {}

  std::size_t n() const { return n_; }
  std::size_t pair_total() const { return signs_.size(); }

  Sign get(std::size_t i, std::size_t j) const { return signs_[pair_index(i, j, n_)]; }
  void set(std::size_t i, std::size_t j, Sign s) { signs_[pair_index(i, j, n_)] = s; }
  Sign at_index(std::size_t k) const { return signs_[k]; }
  void set_at_index(std::size_t k, Sign s) { signs_[k] = s; }
  std::span<const Sign> upper() const { return signs_; }

  bool operator==(const SignedNetwork&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Sign> signs_;
};

/// Group assignment for one observation period. Labels are always the
/// contiguous range 0..group_count()-1 with every label in use.
class Partition {
 public:
  Partition() = default;

  static Partition single_group(std::size_t n);
  static Partition singletons(std::size_t n);
  /// Compresses arbitrary non-negative labels to contiguous ones, keeping
  /// their relative order.
  static Partition from_labels(std::span<const int> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t group_count() const { return sizes_.size(); }
  int label(std::size_t node) const { return labels_[node]; }
  std::size_t group_size(int group) const { return sizes_[static_cast<std::size_t>(group)]; }
  std::span<const int> labels() const { return labels_; }
  bool same_group(std::size_t i, std::size_t j) const { return labels_[i] == labels_[j]; }

  /// Moves `node` to `target`, where target == group_count() opens a new
  /// group. A group left empty is deleted and higher labels shift down by
  /// one. Returns the node's label after re-indexing.
  int move(std::size_t node, int target);

  bool operator==(const Partition& o) const { return labels_ == o.labels_; }

 private:
  std::vector<int> labels_;
  std::vector<std::size_t> sizes_;
};

/// Interaction probabilities: intra-group by tie sign, plus the inter-group rate q.
struct RateParams {
  double p_neg = 0.25;
  double p_zero = 0.5;
  double p_pos = 0.75;
  double q = 0.1;

  double intra(Sign s) const {
    switch (s) {
      case Sign::negative: return p_neg;
      case Sign::absent: return p_zero;
      case Sign::positive: return p_pos;
    }
    return p_zero;
  }
  double& intra(Sign s) {
    switch (s) {
      case Sign::negative: return p_neg;
      case Sign::absent: return p_zero;
      case Sign::positive: return p_pos;
    }
    return p_zero;
  }
  /// 0 < p_neg < p_zero < p_pos < 1 and 0 < q < 1.
  bool valid() const {
    return 0.0 < p_neg && p_neg < p_zero && p_zero < p_pos && p_pos < 1.0 && 0.0 < q &&
           q < 1.0;
  }
  bool operator==(const RateParams&) const = default;
};

/// Symmetric interaction counts out of `t` trials per pair.
class ObservationMatrix {
 public:
  ObservationMatrix() = default;
  ObservationMatrix(std::size_t n, int trials);

  std::size_t n() const { return n_; }
  int trials() const { return trials_; }
  int get(std::size_t i, std::size_t j) const { return counts_[pair_index(i, j, n_)]; }
  void set(std::size_t i, std::size_t j, int count);
  int at_index(std::size_t k) const { return counts_[k]; }
  void set_at_index(std::size_t k, int count);
  std::span<const int> upper() const { return counts_; }
  /// Sum of counts in the row of `node`.
  long row_total(std::size_t node) const;

  bool operator==(const ObservationMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  int trials_ = 0;
  std::vector<int> counts_;
};

/// One or more observation periods over a shared node set.
class ObservationSet {
 public:
  ObservationSet() = default;
  explicit ObservationSet(std::vector<ObservationMatrix> periods);

  std::size_t n() const { return periods_.front().n(); }
  std::size_t size() const { return periods_.size(); }
  const ObservationMatrix& operator[](std::size_t s) const { return periods_[s]; }
  const std::vector<ObservationMatrix>& periods() const { return periods_; }
  bool empty() const { return periods_.empty(); }

 private:
  std::vector<ObservationMatrix> periods_;
};

/// Categorical prior over tie signs, ordered (negative, absent, positive).
struct Priors {
  std::array<double, 3> rho{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  void validate() const;
  double log_rho(Sign s) const;
};

struct PeriodState {
  Partition partition;
  RateParams rates;
  bool operator==(const PeriodState&) const = default;
};

/// Full sampler state: the shared network plus per-period partition and rates.
struct ModelState {
  SignedNetwork network;
  std::vector<PeriodState> periods;
  double log_posterior = 0.0;
};

}  // namespace signet
