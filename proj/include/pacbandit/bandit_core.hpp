// Copyright 2026 The pacbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PACBANDIT_BANDIT_CORE_HPP_
#define PACBANDIT_BANDIT_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pacbandit/divergences.hpp"
#include "pacbandit/error.hpp"
#include "pacbandit/rng.hpp"

namespace pacbandit {

enum class RewardKind { kBernoulli, kPointMass, kDiscretizedBeta };

/// A reward distribution on a finite subset of [0,1].
class RewardModel {
 public:
  static RewardModel bernoulli(double mean) {
    detail::require_unit(mean, "Bernoulli mean");
    return RewardModel(RewardKind::kBernoulli, {0.0, 1.0}, {1.0 - mean, mean});
  }

  static RewardModel point_mass(double value) {
    detail::require_unit(value, "point mass");
    return RewardModel(RewardKind::kPointMass, {value}, {1.0});
  }

  /// Beta(mean * concentration, (1 - mean) * concentration) density sampled
  /// on `levels` evenly spaced points of [0,1] and normalized. The mean of
  /// the discretization is close to, not exactly, `mean`; mean() reports the
  /// exact value.
  static RewardModel discretized_beta(double mean, double concentration,
                                      std::size_t levels = 11) {
    if (!(mean > 0.0 && mean < 1.0)) {
      throw DomainError("discretized beta mean must lie in (0,1)");
    }
    if (!(concentration > 0.0)) throw DomainError("concentration must be positive");
    if (levels < 2) throw DomainError("discretized beta needs >= 2 levels");
    const double alpha = mean * concentration;
    const double beta = (1.0 - mean) * concentration;
    const double step = 1.0 / static_cast<double>(levels - 1);
    std::vector<double> support(levels), log_w(levels);
    for (std::size_t j = 0; j < levels; ++j) {
      support[j] = static_cast<double>(j) * step;
      const double x = std::clamp(support[j], 0.25 * step, 1.0 - 0.25 * step);
      log_w[j] = (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x);
    }
    const double top = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> probs(levels);
    double total = 0.0;
    for (std::size_t j = 0; j < levels; ++j) {
      probs[j] = std::exp(log_w[j] - top);
      total += probs[j];
    }
    for (double& q : probs) q /= total;
    return RewardModel(RewardKind::kDiscretizedBeta, std::move(support),
                       std::move(probs));
  }

  RewardKind kind() const { return kind_; }
  double mean() const { return mean_; }
  std::span<const double> support() const { return support_; }
  std::span<const double> probabilities() const { return probs_; }

  double sample(Engine& rng) const {
    if (kind_ == RewardKind::kBernoulli) return bernoulli_draw(rng);
    if (support_.size() == 1) return support_[0];
    return support_[sample_index(rng, probs_)];
  }

 private:
  RewardModel(RewardKind kind, std::vector<double> support, std::vector<double> probs)
      : kind_(kind), support_(std::move(support)), probs_(std::move(probs)) {
    mean_ = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) mean_ += support_[i] * probs_[i];
    mean_ = std::clamp(mean_, 0.0, 1.0);
  }

  double bernoulli_draw(Engine& rng) const {
    return uniform01(rng) < probs_[1] ? 1.0 : 0.0;
  }

  RewardKind kind_;
  std::vector<double> support_;
  std::vector<double> probs_;
  double mean_ = 0.0;
};

/// K arms with known reward models. best_arm() breaks ties by lowest index.
class Environment {
 public:
  explicit Environment(std::vector<RewardModel> models) : models_(std::move(models)) {
    if (models_.empty()) throw DimensionError("environment needs at least one arm");
    means_.reserve(models_.size());
    for (const auto& m : models_) means_.push_back(m.mean());
    best_arm_ = static_cast<std::size_t>(
        std::max_element(means_.begin(), means_.end()) - means_.begin());
  }

  static Environment bernoulli(const std::vector<double>& means) {
    std::vector<RewardModel> models;
    models.reserve(means.size());
    for (double m : means) models.push_back(RewardModel::bernoulli(m));
    return Environment(std::move(models));
  }

  std::size_t arms() const { return models_.size(); }
  std::span<const double> means() const { return means_; }
  double mean(std::size_t a) const { return means_.at(a); }
  std::size_t best_arm() const { return best_arm_; }
  double best_mean() const { return means_[best_arm_]; }
  const RewardModel& model(std::size_t a) const { return models_.at(a); }

  double draw(std::size_t a, Engine& rng) const { return models_[a].sample(rng); }

 private:
  std::vector<RewardModel> models_;
  std::vector<double> means_;
  std::size_t best_arm_ = 0;
};

// Inverse temperature gamma_t and exploration floor epsilon_t.
struct ScheduleParams {
  double gamma;
  double epsilon;
};

// gamma_t = (K t)^{1/4}, epsilon_t = (K t)^{-1/4}.
inline ScheduleParams schedules(std::size_t t, std::size_t k) {
  if (t < 1) throw DomainError("schedules are defined for t >= 1");
  if (k < 2) throw DomainError("schedules need K >= 2");
  const double root = std::pow(static_cast<double>(k), 0.25) *
                      std::pow(static_cast<double>(t), 0.25);
  return ScheduleParams{root, 1.0 / root};
}

// Default warmup: K^3 rounds of uniform play.
inline std::size_t default_warmup_length(std::size_t k) { return k * k * k; }

/// rho(a) proportional to exp(gamma * r_hat(a)).
///
/// gamma * r_hat is shifted by its maximum before exponentiation; importance
/// weighted estimates make gamma * r_hat reach the hundreds.
inline SimplexVector gibbs_posterior(std::span<const double> r_hat, double gamma) {
  if (r_hat.empty()) throw DimensionError("Gibbs posterior over zero arms");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw DomainError("inverse temperature must be finite and nonnegative");
  }
  double top = -kInfinity;
  for (double r : r_hat) {
    if (!std::isfinite(r)) throw DomainError("Gibbs posterior needs finite estimates");
    top = std::max(top, gamma * r);
  }
  std::vector<double> w(r_hat.size());
  double z = 0.0;
  for (std::size_t a = 0; a < r_hat.size(); ++a) {
    w[a] = std::exp(gamma * r_hat[a] - top);
    z += w[a];
  }
  for (double& x : w) x /= z;
  return SimplexVector(std::move(w));
}

// Tolerance on K * epsilon <= 1; at t = K^3 the product is 1 up to rounding.
inline constexpr double kSmoothingTolerance = 1e-12;

/// (1 - K eps) rho(a) + eps: mixes rho with the uniform distribution so every
/// arm keeps probability at least eps.
inline SimplexVector smooth_policy(const SimplexVector& rho, double epsilon_next) {
  const double k = static_cast<double>(rho.size());
  if (!(epsilon_next >= 0.0)) throw DomainError("epsilon must be nonnegative");
  if (k * epsilon_next > 1.0 + kSmoothingTolerance) {
    throw ScheduleError("K * epsilon = " + std::to_string(k * epsilon_next) +
                        " exceeds 1; smoothing needs t >= K^3");
  }
  if (epsilon_next == 0.0) return rho;
  const double keep = std::max(0.0, 1.0 - k * epsilon_next);
  std::vector<double> w(rho.size());
  for (std::size_t a = 0; a < rho.size(); ++a) w[a] = keep * rho[a] + epsilon_next;
  return SimplexVector(std::move(w));
}

inline SimplexVector warmup_policy(std::size_t k) {
  if (k < 2) throw DomainError("warmup policy needs K >= 2");
  return SimplexVector::uniform(k);
}

/// Deterministic lower bound on min_a pi_tau(a) for the strategy: 1/K while
/// warming up, epsilon_tau afterwards. Independent of the game history.
inline double policy_floor(std::size_t tau, std::size_t k, std::size_t warmup_length) {
  if (tau <= 1 || tau < warmup_length) return 1.0 / static_cast<double>(k);
  return schedules(tau, k).epsilon;
}

/// Running importance-weighted statistics after t rounds.
///
/// sum_weighted(a) accumulates R_tau^a = I{A_tau = a} R_tau / pi_tau(a), so
/// R_hat_t(a) = sum_weighted(a) / t. pi_lmin is the minimum of pi_tau(a) over
/// all arms and rounds so far (1/K before the first round).
class PolicyState {
 public:
  PolicyState(std::size_t k, std::size_t warmup_length)
      : sum_weighted_(k, 0.0),
        pi_lmin_(k == 0 ? 1.0 : 1.0 / static_cast<double>(k)),
        warmup_length_(warmup_length) {
    if (k < 2) throw DomainError("bandit state needs K >= 2");
  }

  std::size_t round() const { return t_; }
  std::size_t arms() const { return sum_weighted_.size(); }
  std::size_t warmup_length() const { return warmup_length_; }
  std::span<const double> sum_weighted() const { return sum_weighted_; }
  double pi_lmin() const { return pi_lmin_; }

  double r_hat(std::size_t a) const {
    return t_ == 0 ? 0.0 : sum_weighted_.at(a) / static_cast<double>(t_);
  }

  std::vector<double> r_hat() const {
    std::vector<double> out(arms());
    for (std::size_t a = 0; a < arms(); ++a) out[a] = r_hat(a);
    return out;
  }

  // Records round t + 1. Returns the importance weight added to `action`.
  double record(const SimplexVector& pi, std::size_t action, double reward) {
    if (pi.size() != arms()) throw DimensionError("policy size does not match K");
    if (action >= arms()) throw DimensionError("action out of range");
    detail::require_unit(reward, "reward");
    if (!(pi[action] > 0.0)) {
      throw DomainError("played an arm with zero sampling probability");
    }
    const double weighted = reward / pi[action];
    sum_weighted_[action] += weighted;
    pi_lmin_ = std::min(pi_lmin_, pi.min());
    ++t_;
    return weighted;
  }

 private:
  std::size_t t_ = 0;
  std::vector<double> sum_weighted_;
  double pi_lmin_;
  std::size_t warmup_length_;
};

inline PolicyState update_estimates(PolicyState state, const SimplexVector& pi,
                                    std::size_t action, double reward) {
  state.record(pi, action, reward);
  return state;
}

/// Sampling distribution for round state.round() + 1.
///
/// Rounds 1..W-1 (W = warmup length) play uniformly. From round W onward,
/// pi_{t+1} = smooth_policy(gibbs_posterior(R_hat_t, gamma_t), eps_{t+1}),
/// which for W = K^3 coincides with the uniform policy at the boundary since
/// K eps_{K^3} = 1. Round 1 is always uniform.
inline SimplexVector next_policy(const PolicyState& state) {
  const std::size_t k = state.arms();
  const std::size_t t = state.round();
  const std::size_t next = t + 1;
  if (t == 0 || next < state.warmup_length()) return warmup_policy(k);
  const auto rho = gibbs_posterior(state.r_hat(), schedules(t, k).gamma);
  return smooth_policy(rho, schedules(next, k).epsilon);
}

enum class TraceMode { kSummary, kFull };

struct GameConfig {
  // 0 selects the default K^3.
  std::size_t warmup_length = 0;
  TraceMode mode = TraceMode::kSummary;
};

inline std::size_t resolved_warmup(const GameConfig& config, std::size_t k) {
  return config.warmup_length == 0 ? default_warmup_length(k) : config.warmup_length;
}

// What the observer sees after round t has been recorded.
struct RoundView {
  std::size_t t;
  const SimplexVector& policy;  // pi_t
  std::size_t action;
  double reward;
  const PolicyState& state;     // includes round t
};

/// Plays `horizon` rounds, calling observer(view) after each. The strategy
/// draws the action then the reward from `rng`, in that order, every round.
inline void play_game(const Environment& env, std::size_t horizon, Engine& rng,
                      const GameConfig& config,
                      const std::function<void(const RoundView&)>& observer) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  const std::size_t k = env.arms();
  PolicyState state(k, resolved_warmup(config, k));
  for (std::size_t t = 1; t <= horizon; ++t) {
    const SimplexVector pi = next_policy(state);
    const std::size_t action = sample_index(rng, pi.weights());
    const double reward = env.draw(action, rng);
    state.record(pi, action, reward);
    if (observer) observer(RoundView{t, pi, action, reward, state});
  }
}

struct TraceRound {
  std::size_t t;
  SimplexVector policy;
  std::size_t action;
  double reward;
  std::vector<double> r_hat;     // R_hat_t, including this round
  double pi_lmin;                // running minimum including this round
  std::vector<double> weighted;  // R_t^a for every arm; kFull mode only
};

/// Record of a game: the history T_t with per-round estimates.
struct GameTrace {
  std::size_t arms = 0;
  std::size_t warmup_length = 0;
  TraceMode mode = TraceMode::kSummary;
  std::vector<TraceRound> rounds;

  // R_t^a of round t; recomputed in kSummary mode.
  std::vector<double> weighted_samples(std::size_t index) const {
    const auto& r = rounds.at(index);
    if (!r.weighted.empty()) return r.weighted;
    std::vector<double> w(arms, 0.0);
    w[r.action] = r.reward / r.policy[r.action];
    return w;
  }
};

// Deterministic in (seed, stream): stream i matches trajectory i of the
// harness's Monte Carlo campaigns under master seed `seed`.
inline GameTrace run_game(const Environment& env, std::size_t horizon,
                          std::uint64_t seed, const GameConfig& config = {},
                          std::uint64_t stream = 0) {
  GameTrace trace;
  trace.arms = env.arms();
  trace.warmup_length = resolved_warmup(config, env.arms());
  trace.mode = config.mode;
  trace.rounds.reserve(horizon);
  Engine rng = make_stream(seed, stream);
  play_game(env, horizon, rng, config, [&](const RoundView& v) {
    TraceRound row{v.t, v.policy, v.action, v.reward, v.state.r_hat(),
                   v.state.pi_lmin(), {}};
    if (config.mode == TraceMode::kFull) {
      row.weighted.assign(env.arms(), 0.0);
      row.weighted[v.action] = v.reward / v.policy[v.action];
    }
    trace.rounds.push_back(std::move(row));
  });
  return trace;
}

}  // namespace pacbandit

#endif  // PACBANDIT_BANDIT_CORE_HPP_
