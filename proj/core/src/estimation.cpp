#include "signet/estimation.hpp"

#include <cmath>

namespace signet {

namespace {

class SignTally {
 public:
  void add(const SignedNetwork& net) {
    if (draws_ == 0) {
      n_ = net.n();
      counts_.assign(pair_count(n_), std::array<long, 3>{});
    } else if (net.n() != n_) {
      throw DataError("draws disagree on node count");
    }
    for (std::size_t k = 0; k < net.pair_total(); ++k) {
      ++counts_[k][static_cast<std::size_t>(sign_index(net.at_index(k)))];
    }
    ++draws_;
  }

  EdgeMarginals finish() const {
    if (draws_ == 0) throw DataError("no draws to estimate marginals from");
    EdgeMarginals m(n_);
    const double total = static_cast<double>(draws_);
    for (std::size_t k = 0; k < counts_.size(); ++k) {
      for (std::size_t c = 0; c < 3; ++c) {
        m.at_index(k)[c] = static_cast<double>(counts_[k][c]) / total;
      }
    }
    return m;
  }

 private:
  std::size_t n_ = 0;
  long draws_ = 0;
  std::vector<std::array<long, 3>> counts_;
};

}  // namespace

EdgeMarginals edge_marginals(std::span<const SignedNetwork> networks) {
  SignTally tally;
  for (const auto& net : networks) tally.add(net);
  return tally.finish();
}

EdgeMarginals edge_marginals(std::span<const SampleSet> chains) {
  SignTally tally;
  for (const auto& chain : chains) {
    for (const auto& draw : chain.draws) tally.add(draw.network);
  }
  return tally.finish();
}

EdgeMarginals edge_marginals(const SampleSet& samples) {
  return edge_marginals(std::span<const SampleSet>(&samples, 1));
}

PairMatrix posterior_mean(const EdgeMarginals& m) {
  PairMatrix out(m.n());
  for (std::size_t k = 0; k < m.values().size(); ++k) {
    const auto& p = m.at_index(k);
    out.at_index(k) = p[2] - p[0];
  }
  return out;
}

double triple_entropy(const EdgeMarginals::Triple& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

PairMatrix edge_entropy(const EdgeMarginals& m) {
  PairMatrix out(m.n());
  for (std::size_t k = 0; k < m.values().size(); ++k) out.at_index(k) = triple_entropy(m.at_index(k));
  return out;
}

}  // namespace signet
