#include "signet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "signet/parallel.hpp"

namespace signet {

namespace {

// x log r + (t - x) log(1 - r), the rate-dependent part of a binomial term.
double bernoulli_loglik(int x, int t, double r) {
  return x * std::log(r) + (t - x) * std::log1p(-r);
}

double rate_of_class(const RateParams& rates, std::size_t c) {
  return c < 3 ? rates.intra(sign_from_index(static_cast<int>(c))) : rates.q;
}

std::size_t slot_class(RateSlot slot) {
  switch (slot) {
    case RateSlot::p_neg: return 0;
    case RateSlot::p_zero: return 1;
    case RateSlot::p_pos: return 2;
    case RateSlot::q: return 3;
  }
  return 3;
}

constexpr std::array<RateSlot, 3> kIntraSlots{RateSlot::p_neg, RateSlot::p_zero,
                                              RateSlot::p_pos};

}  // namespace

void SamplerConfig::validate() const {
  if (!(sigma_intra > 0.0) || !(sigma_inter > 0.0)) {
    throw ConfigError("proposal standard deviations must be positive");
  }
  if (sweeps < 1) throw ConfigError("sweeps must be at least 1");
  if (burn_in < 0 || burn_in >= sweeps) {
    throw ConfigError(fmt::format("burn_in {} must lie in [0, sweeps={})", burn_in, sweeps));
  }
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (flips_per_pair < 1) throw ConfigError("flips_per_pair must be at least 1");
  if (edge_proposals < 0) throw ConfigError("edge_proposals must be non-negative");
  if (!initial_rates.valid()) {
    throw ConfigError("initial rates must satisfy 0 < p_neg < p_zero < p_pos < 1, 0 < q < 1");
  }
  priors.validate();
}

int SamplerConfig::resolved_init_sweeps() const {
  return init_sweeps < 0 ? sweeps / 5 : init_sweeps;
}

void TemperatureLadder::validate() const {
  if (betas.empty()) throw ConfigError("temperature ladder is empty");
  if (betas.front() != 1.0) throw ConfigError("first inverse temperature must be 1");
  for (std::size_t u = 1; u < betas.size(); ++u) {
    if (!(betas[u] < betas[u - 1]) || !(betas[u] > 0.0)) {
      throw ConfigError("inverse temperatures must be positive and strictly decreasing");
    }
  }
  if (swap_interval < 1) throw ConfigError("swap interval must be at least 1");
}

TemperatureLadder TemperatureLadder::geometric(std::size_t replicas, double ratio,
                                               int swap_interval) {
  TemperatureLadder ladder;
  ladder.betas.clear();
  double beta = 1.0;
  for (std::size_t u = 0; u < replicas; ++u, beta *= ratio) ladder.betas.push_back(beta);
  ladder.swap_interval = swap_interval;
  ladder.validate();
  return ladder;
}

RateSlot rate_slot_for(Sign s) {
  switch (s) {
    case Sign::negative: return RateSlot::p_neg;
    case Sign::absent: return RateSlot::p_zero;
    case Sign::positive: return RateSlot::p_pos;
  }
  return RateSlot::p_zero;
}

double rate_value(const RateParams& rates, RateSlot slot) {
  return slot == RateSlot::q ? rates.q : rates.intra(sign_from_index(static_cast<int>(slot_class(slot))));
}

RateParams with_rate(RateParams rates, RateSlot slot, double value) {
  switch (slot) {
    case RateSlot::p_neg: rates.p_neg = value; break;
    case RateSlot::p_zero: rates.p_zero = value; break;
    case RateSlot::p_pos: rates.p_pos = value; break;
    case RateSlot::q: rates.q = value; break;
  }
  return rates;
}

// ---------------------------------------------------------------------------
// Direct kernels

Sign propose_other_sign(Sign current, Rng& rng) {
  const int k = sign_index(current);
  const int step = std::uniform_int_distribution<int>(1, 2)(rng);
  return sign_from_index((k + step) % 3);
}

EdgeFlip propose_edge_flip(const ModelState& state, Rng& rng) {
  const std::size_t n = state.network.n();
  if (n < 2) throw std::invalid_argument("edge flips need at least two nodes");
  const std::size_t k =
      std::uniform_int_distribution<std::size_t>(0, pair_count(n) - 1)(rng);
  return {pair_from_index(k, n), propose_other_sign(state.network.at_index(k), rng)};
}

double edge_flip_log_ratio(const ModelState& state, const ObservationSet& obs,
                           const Priors& priors, NodePair pair, Sign new_sign) {
  const Sign old_sign = state.network.get(pair.i, pair.j);
  if (old_sign == new_sign) return 0.0;
  double total = priors.log_rho(new_sign) - priors.log_rho(old_sign);
  for (std::size_t s = 0; s < obs.size(); ++s) {
    const auto& period = state.periods[s];
    if (!period.partition.same_group(pair.i, pair.j)) continue;
    const int x = obs[s].get(pair.i, pair.j);
    const int t = obs[s].trials();
    total += bernoulli_loglik(x, t, period.rates.intra(new_sign)) -
             bernoulli_loglik(x, t, period.rates.intra(old_sign));
  }
  return total;
}

double propose_rate(double current, double sigma, Rng& rng) {
  return current + std::normal_distribution<double>(0.0, sigma)(rng);
}

double intra_rate_log_ratio(const ModelState& state, const ObservationSet& obs,
                            std::size_t period, Sign sign, double p_new) {
  const auto& ps = state.periods.at(period);
  const RateParams proposed = with_rate(ps.rates, rate_slot_for(sign), p_new);
  if (!proposed.valid()) return kNegInf;
  const double p_old = ps.rates.intra(sign);
  const auto& x = obs[period];
  const std::size_t n = x.n();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!ps.partition.same_group(i, j) || state.network.get(i, j) != sign) continue;
      total += bernoulli_loglik(x.get(i, j), x.trials(), p_new) -
               bernoulli_loglik(x.get(i, j), x.trials(), p_old);
    }
  }
  return total;
}

double inter_rate_log_ratio(const ModelState& state, const ObservationSet& obs,
                            std::size_t period, double q_new) {
  if (!(q_new > 0.0 && q_new < 1.0)) return kNegInf;
  const auto& ps = state.periods.at(period);
  const auto& x = obs[period];
  const std::size_t n = x.n();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ps.partition.same_group(i, j)) continue;
      total += bernoulli_loglik(x.get(i, j), x.trials(), q_new) -
               bernoulli_loglik(x.get(i, j), x.trials(), ps.rates.q);
    }
  }
  return total;
}

std::vector<double> partition_proposal_distribution(const ModelState& state,
                                                    const ObservationSet& obs,
                                                    std::size_t period, std::size_t node) {
  const auto& g = state.periods.at(period).partition;
  const auto& x = obs[period];
  if (node >= g.size()) throw std::out_of_range("node outside partition");
  const std::size_t gamma = g.group_count();
  std::vector<double> weights(gamma + 1, 1.0);
  double total_count = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == node) continue;
    weights[static_cast<std::size_t>(g.label(j))] += x.get(node, j);
    total_count += x.get(node, j);
  }
  const double denominator = total_count + static_cast<double>(gamma) + 1.0;
  for (double& w : weights) w /= denominator;
  return weights;
}

double partition_move_log_ratio(const ModelState& state, const ObservationSet& obs,
                                std::size_t period, std::size_t node, int target) {
  const auto& ps = state.periods.at(period);
  const auto& g = ps.partition;
  const int gamma = static_cast<int>(g.group_count());
  if (target < 0 || target > gamma) throw std::out_of_range("target group out of range");
  const int from = g.label(node);
  const bool was_singleton = g.group_size(from) == 1;
  if (target == from || (target == gamma && was_singleton)) return 0.0;

  const double forward = partition_proposal_distribution(state, obs, period, node)
      [static_cast<std::size_t>(target)];

  ModelState proposed = state;
  auto& g_new = proposed.periods[period].partition;
  g_new.move(node, target);

  const auto& x = obs[period];
  double likelihood = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == node) continue;
    const int c = x.get(node, j);
    likelihood +=
        bernoulli_loglik(c, x.trials(), pair_rate(state.network, g_new, ps.rates, node, j)) -
        bernoulli_loglik(c, x.trials(), pair_rate(state.network, g, ps.rates, node, j));
  }

  // Reverse move: back into the remains of the old group, or into a new group
  // when the old one was deleted.
  int reverse_target = static_cast<int>(g_new.group_count());
  if (!was_singleton) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j != node && g.label(j) == from) {
        reverse_target = g_new.label(j);
        break;
      }
    }
  }
  const double reverse = partition_proposal_distribution(proposed, obs, period, node)
      [static_cast<std::size_t>(reverse_target)];
  return likelihood + std::log(reverse) - std::log(forward);
}

// ---------------------------------------------------------------------------
// Chain

Chain::Chain(const ObservationSet& obs, const SamplerConfig& config, ModelState initial, Rng rng,
             double beta)
    : obs_(&obs), config_(config), state_(std::move(initial)), rng_(rng), beta_(beta) {
  config_.validate();
  check_dimensions(state_, obs);
  const std::size_t n = obs.n();
  pairs_.reserve(pair_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs_.push_back({i, j});
  }
  order_.resize(pairs_.size());
  rebuild_cache();
  recompute();
}

void Chain::set_state(ModelState state) {
  check_dimensions(state, *obs_);
  state_ = std::move(state);
  rebuild_cache();
  recompute();
}

void Chain::recompute() { state_.log_posterior = signet::log_posterior(state_, *obs_, config_.priors); }

void Chain::swap_state(Chain& other) {
  std::swap(state_, other.state_);
  std::swap(cache_, other.cache_);
}

std::size_t Chain::pair_class(std::size_t period, std::size_t i, std::size_t j) const {
  return state_.periods[period].partition.same_group(i, j)
             ? static_cast<std::size_t>(sign_index(state_.network.get(i, j)))
             : kCross;
}

void Chain::refresh_log_rates(std::size_t period) {
  const auto& rates = state_.periods[period].rates;
  auto& c = cache_[period];
  for (std::size_t k = 0; k < 4; ++k) {
    const double r = rate_of_class(rates, k);
    c.log_rate[k] = std::log(r);
    c.log_miss[k] = std::log1p(-r);
  }
}

void Chain::rebuild_cache() {
  cache_.assign(obs_->size(), PeriodCache{});
  for (std::size_t s = 0; s < obs_->size(); ++s) {
    const auto& x = (*obs_)[s];
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      auto& t = cache_[s].totals[pair_class(s, pairs_[k].i, pairs_[k].j)];
      ++t.pairs;
      t.successes += x.at_index(k);
    }
    refresh_log_rates(s);
  }
}

bool Chain::accept(double log_ratio) { return std::log(uniform01(rng_)) < log_ratio; }

double Chain::edge_flip_log_ratio(std::size_t pair, Sign new_sign) const {
  const Sign old_sign = state_.network.at_index(pair);
  if (old_sign == new_sign) return 0.0;
  const auto [i, j] = pairs_[pair];
  const auto from = static_cast<std::size_t>(sign_index(old_sign));
  const auto to = static_cast<std::size_t>(sign_index(new_sign));
  double total = config_.priors.log_rho(new_sign) - config_.priors.log_rho(old_sign);
  for (std::size_t s = 0; s < obs_->size(); ++s) {
    if (!state_.periods[s].partition.same_group(i, j)) continue;
    const auto& c = cache_[s];
    const int x = (*obs_)[s].at_index(pair);
    const int misses = (*obs_)[s].trials() - x;
    total += x * (c.log_rate[to] - c.log_rate[from]) + misses * (c.log_miss[to] - c.log_miss[from]);
  }
  return total;
}

bool Chain::edge_step(std::size_t pair) {
  const Sign old_sign = state_.network.at_index(pair);
  const Sign new_sign = propose_other_sign(old_sign, rng_);
  const double delta = edge_flip_log_ratio(pair, new_sign);
  ++stats_.edge.proposed;
  if (!accept(beta_ * delta)) return false;
  ++stats_.edge.accepted;
  const auto [i, j] = pairs_[pair];
  const auto from = static_cast<std::size_t>(sign_index(old_sign));
  const auto to = static_cast<std::size_t>(sign_index(new_sign));
  for (std::size_t s = 0; s < obs_->size(); ++s) {
    if (!state_.periods[s].partition.same_group(i, j)) continue;
    const int x = (*obs_)[s].at_index(pair);
    auto& totals = cache_[s].totals;
    --totals[from].pairs;
    totals[from].successes -= x;
    ++totals[to].pairs;
    totals[to].successes += x;
  }
  state_.network.set_at_index(pair, new_sign);
  state_.log_posterior += delta;
  return true;
}

double Chain::rate_log_ratio(std::size_t period, RateSlot slot, double value) const {
  const auto& rates = state_.periods[period].rates;
  if (!with_rate(rates, slot, value).valid()) return kNegInf;
  const std::size_t c = slot_class(slot);
  const auto& totals = cache_[period].totals[c];
  if (totals.pairs == 0) return 0.0;
  const double old_value = rate_value(rates, slot);
  const long trials = (*obs_)[period].trials();
  const long misses = totals.pairs * trials - totals.successes;
  return static_cast<double>(totals.successes) * (std::log(value) - cache_[period].log_rate[c]) +
         static_cast<double>(misses) * (std::log1p(-value) - std::log1p(-old_value));
}

bool Chain::rate_step(std::size_t period, RateSlot slot) {
  auto& rates = state_.periods[period].rates;
  const double sigma = slot == RateSlot::q ? config_.sigma_inter : config_.sigma_intra;
  const double value = propose_rate(rate_value(rates, slot), sigma, rng_);
  const double delta = rate_log_ratio(period, slot, value);
  auto& counter = slot == RateSlot::q ? stats_.inter : stats_.intra;
  ++counter.proposed;
  if (!accept(beta_ * delta)) return false;
  ++counter.accepted;
  rates = with_rate(rates, slot, value);
  refresh_log_rates(period);
  state_.log_posterior += delta;
  return true;
}

void Chain::gather_groups(std::size_t period, std::size_t node, std::vector<long>& counts,
                          std::vector<double>& gains) const {
  const auto& g = state_.periods[period].partition;
  const auto& x = (*obs_)[period];
  const auto& c = cache_[period];
  const int t = x.trials();
  counts.assign(g.group_count(), 0);
  gains.assign(g.group_count(), 0.0);
  const std::size_t n = g.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == node) continue;
    const int count = x.get(node, j);
    const auto label = static_cast<std::size_t>(g.label(j));
    const auto cls = static_cast<std::size_t>(sign_index(state_.network.get(node, j)));
    counts[label] += count;
    gains[label] += count * (c.log_rate[cls] - c.log_rate[kCross]) +
                    (t - count) * (c.log_miss[cls] - c.log_miss[kCross]);
  }
}

Chain::MoveTerms Chain::partition_terms(std::size_t period, std::size_t node, int target,
                                        const std::vector<long>& counts,
                                        const std::vector<double>& gains) const {
  const auto& g = state_.periods[period].partition;
  const int gamma = static_cast<int>(g.group_count());
  const int from = g.label(node);
  const bool was_singleton = g.group_size(from) == 1;
  if (target == from || (target == gamma && was_singleton)) return {};
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const auto idx = [](int k) { return static_cast<std::size_t>(k); };

  MoveTerms terms;
  terms.log_posterior = (target < gamma ? gains[idx(target)] : 0.0) - gains[idx(from)];
  const double forward =
      (target < gamma ? 1.0 + counts[idx(target)] : 1.0) / (total + gamma + 1.0);
  const int gamma_after = gamma - (was_singleton ? 1 : 0) + (target == gamma ? 1 : 0);
  const double reverse =
      (was_singleton ? 1.0 : 1.0 + counts[idx(from)]) / (total + gamma_after + 1.0);
  terms.log_proposal = std::log(reverse) - std::log(forward);
  return terms;
}

double Chain::partition_move_log_ratio(std::size_t period, std::size_t node, int target) const {
  const int gamma = static_cast<int>(state_.periods[period].partition.group_count());
  if (target < 0 || target > gamma) throw std::out_of_range("target group out of range");
  std::vector<long> counts;
  std::vector<double> gains;
  gather_groups(period, node, counts, gains);
  const auto terms = partition_terms(period, node, target, counts, gains);
  return terms.log_posterior + terms.log_proposal;
}

void Chain::apply_partition_move(std::size_t period, std::size_t node, int target) {
  auto& g = state_.periods[period].partition;
  const auto& x = (*obs_)[period];
  auto& totals = cache_[period].totals;
  const int from = g.label(node);
  const bool opens_group = target == static_cast<int>(g.group_count());
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == node) continue;
    const int label = g.label(j);
    if (label != from && (opens_group || label != target)) continue;
    const int count = x.get(node, j);
    const auto cls = static_cast<std::size_t>(sign_index(state_.network.get(node, j)));
    // Leaving the old group turns intra pairs into cross pairs; joining the
    // target does the opposite.
    const auto [out, in] = label == from ? std::pair{cls, kCross} : std::pair{kCross, cls};
    --totals[out].pairs;
    totals[out].successes -= count;
    ++totals[in].pairs;
    totals[in].successes += count;
  }
  g.move(node, target);
}

bool Chain::partition_step(std::size_t period, std::size_t node) {
  const auto& g = state_.periods[period].partition;
  gather_groups(period, node, group_counts_, group_gains_);
  const int gamma = static_cast<int>(g.group_count());
  const double total = std::accumulate(group_counts_.begin(), group_counts_.end(), 0.0);
  double u = uniform01(rng_) * (total + gamma + 1.0);
  int target = gamma;
  for (int k = 0; k < gamma; ++k) {
    u -= 1.0 + group_counts_[static_cast<std::size_t>(k)];
    if (u < 0.0) {
      target = k;
      break;
    }
  }
  const int from = g.label(node);
  const bool unchanged = target == from || (target == gamma && g.group_size(from) == 1);
  const auto terms = partition_terms(period, node, target, group_counts_, group_gains_);
  ++stats_.partition.proposed;
  if (!accept(beta_ * terms.log_posterior + terms.log_proposal)) return false;
  ++stats_.partition.accepted;
  if (!unchanged) {
    apply_partition_move(period, node, target);
    state_.log_posterior += terms.log_posterior;
  }
  return true;
}

void Chain::sweep() { sweep(SweepBlocks{}); }

void Chain::sweep(const SweepBlocks& blocks) {
  const std::size_t periods = obs_->size();
  if (blocks.network && !pairs_.empty() && config_.edge_proposals > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, pairs_.size() - 1);
    for (int k = 0; k < config_.edge_proposals; ++k) edge_step(pick(rng_));
  } else if (blocks.network && !pairs_.empty()) {
    for (int rep = 0; rep < config_.flips_per_pair; ++rep) {
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      std::shuffle(order_.begin(), order_.end(), rng_);
      for (std::size_t k : order_) edge_step(k);
    }
  }
  if (!config_.freeze_rates) {
    if (blocks.intra) {
      for (std::size_t s = 0; s < periods; ++s) {
        for (RateSlot slot : kIntraSlots) rate_step(s, slot);
      }
    }
    if (blocks.inter) {
      for (std::size_t s = 0; s < periods; ++s) rate_step(s, RateSlot::q);
    }
  }
  if (blocks.partition) {
    for (std::size_t s = 0; s < periods; ++s) {
      for (std::size_t node = 0; node < obs_->n(); ++node) partition_step(s, node);
    }
  }
}

// ---------------------------------------------------------------------------
// Drivers

ModelState initial_state(const ObservationSet& obs, const SamplerConfig& config) {
  ModelState state;
  state.network = SignedNetwork(obs.n());
  state.periods.assign(obs.size(), PeriodState{Partition::singletons(obs.n()), config.initial_rates});
  state.log_posterior = log_posterior(state, obs, config.priors);
  return state;
}

ModelState sweep(const ModelState& state, const ObservationSet& obs, const SamplerConfig& config,
                 Rng& rng) {
  Chain chain(obs, config, state, Rng(rng()));
  chain.sweep();
  return chain.state();
}

ModelState smart_init(const ObservationSet& obs, const SamplerConfig& config, Rng& rng) {
  ModelState state = initial_state(obs, config);
  for (auto& period : state.periods) period.partition = Partition::single_group(obs.n());
  Chain chain(obs, config, std::move(state), Rng(rng()));
  // q has no cross-group pairs to learn from while everyone shares a group.
  const SweepBlocks phase_one{.network = true, .intra = true, .inter = false, .partition = false};
  for (int k = 0; k < config.resolved_init_sweeps(); ++k) chain.sweep(phase_one);
  ModelState out = chain.state();
  for (auto& period : out.periods) period.partition = Partition::singletons(obs.n());
  out.log_posterior = log_posterior(out, obs, config.priors);
  return out;
}

namespace {

bool keep_draw(int sweep, const SamplerConfig& config) {
  return sweep > config.burn_in && (sweep - config.burn_in) % config.thin == 0;
}

}  // namespace

SampleSet run_chain(const ObservationSet& obs, const SamplerConfig& config, Rng& rng) {
  config.validate();
  ModelState init = config.smart_init ? smart_init(obs, config, rng) : initial_state(obs, config);
  Chain chain(obs, config, std::move(init), Rng(rng()));
  SampleSet out;
  out.draws.reserve(static_cast<std::size_t>((config.sweeps - config.burn_in) / config.thin));
  for (int s = 1; s <= config.sweeps; ++s) {
    chain.sweep();
    if (keep_draw(s, config)) out.draws.push_back(chain.state());
  }
  out.stats = chain.stats();
  return out;
}

double swap_log_acceptance(double beta_u, double beta_v, double log_post_u, double log_post_v) {
  if (beta_u == beta_v) return 0.0;
  return (beta_v - beta_u) * (log_post_u - log_post_v);
}

SampleSet run_tempered(const ObservationSet& obs, const SamplerConfig& config,
                       const TemperatureLadder& ladder, Rng& rng, int workers) {
  config.validate();
  ladder.validate();
  const std::size_t replicas = ladder.betas.size();
  std::vector<Chain> chains;
  chains.reserve(replicas);
  for (std::size_t u = 0; u < replicas; ++u) {
    ModelState init =
        config.smart_init ? smart_init(obs, config, rng) : initial_state(obs, config);
    chains.emplace_back(obs, config, std::move(init), Rng(rng()), ladder.betas[u]);
  }
  SampleSet out;
  for (int s = 1; s <= config.sweeps; ++s) {
    parallel_for(replicas, workers, [&](std::size_t u) { chains[u].sweep(); });
    if (replicas > 1 && s % ladder.swap_interval == 0) {
      const std::size_t u = std::uniform_int_distribution<std::size_t>(0, replicas - 2)(rng);
      const std::size_t v = u + 1;
      const double log_alpha = swap_log_acceptance(ladder.betas[u], ladder.betas[v],
                                                   chains[u].log_posterior(),
                                                   chains[v].log_posterior());
      ++out.stats.swap.proposed;
      if (std::log(uniform01(rng)) < log_alpha) {
        ++out.stats.swap.accepted;
        chains[u].swap_state(chains[v]);
      }
    }
    if (keep_draw(s, config)) out.draws.push_back(chains.front().state());
  }
  const auto swaps = out.stats.swap;
  out.stats = chains.front().stats();
  out.stats.swap = swaps;
  return out;
}

}  // namespace signet
