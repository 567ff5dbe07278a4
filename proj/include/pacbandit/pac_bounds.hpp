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

#ifndef PACBANDIT_PAC_BOUNDS_HPP_
#define PACBANDIT_PAC_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pacbandit/bandit_core.hpp"
#include "pacbandit/certificate.hpp"
#include "pacbandit/concentration.hpp"
#include "pacbandit/divergences.hpp"
#include "pacbandit/error.hpp"

namespace pacbandit {

enum class LambdaRule { kOptimal, kFixed };

/// Parameters shared by the thm2 and thm3 certificates.
///
/// `weights` empty means the uniform weighting w_tau = 1/t. The prior is
/// data-independent (uniform by default).
struct BoundConfig {
  double delta;
  SimplexVector prior;
  std::vector<double> weights;
  LambdaRule lambda_rule = LambdaRule::kOptimal;
  double lambda_value = 0.0;

  BoundConfig(double delta_in, std::size_t arms)
      : delta(delta_in), prior(SimplexVector::uniform(arms)) {
    detail::require_delta(delta);
  }

  std::size_t arms() const { return prior.size(); }

  void validate() const {
    detail::require_delta(delta);
    if (!weights.empty()) {
      double total = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("weights must be nonnegative");
        total += w;
      }
      if (!(total > 0.0)) throw DomainError("weights must have a positive sum");
    }
    if (lambda_rule == LambdaRule::kFixed && !(lambda_value > 0.0)) {
      throw DomainError("fixed lambda must be positive");
    }
  }
};

namespace detail {

inline void require_round(std::size_t t) {
  if (t < 1) throw DomainError("bounds are stated for t >= 1");
}

inline double log_term3(std::size_t t, double delta) {
  return 3.0 * std::log(static_cast<double>(t) + 1.0) - std::log(delta);
}

// 2 ln(t+1) + ln(2/delta).
inline double log_term_martingale(std::size_t t, double delta) {
  return 2.0 * std::log(static_cast<double>(t) + 1.0) + std::log(2.0 / delta);
}

}  // namespace detail

// (KL(rho||mu) + 3 ln(t+1) - ln delta) / t.
inline double thm2_kl_rhs(double kl_rho_mu, std::size_t t, double delta) {
  detail::require_round(t);
  detail::require_delta(delta);
  if (!(kl_rho_mu >= 0.0)) throw DomainError("KL must be nonnegative");
  return (kl_rho_mu + detail::log_term3(t, delta)) / static_cast<double>(t);
}

// |R(rho) - R_hat(rho)| <= sqrt(rhs / 2) / pi_lmin.
inline double thm2_l1_gap(double kl_rho_mu, std::size_t t, double delta,
                          double pi_lmin) {
  if (!(pi_lmin > 0.0 && pi_lmin <= 1.0)) {
    throw DomainError("pi_lmin must lie in (0,1]");
  }
  return pinsker_gap(thm2_kl_rhs(kl_rho_mu, t, delta)) / pi_lmin;
}

// Scaled means may overshoot [0,1] by this much from rounding.
inline constexpr double kScaledTolerance = 1e-12;

/// kl(pi_lmin R_hat(rho) || pi_lmin R(rho)) <= thm2_kl_rhs.
///
/// Both scaled means must lie in [0,1]: every importance-weighted sample is
/// at most 1 / pi_lmin, so pi_lmin R_hat is a mean of [0,1] variables.
inline Certificate thm2_kl_certificate(double r_hat_rho, double r_rho, double pi_lmin,
                                       double kl_rho_mu, std::size_t t, double delta) {
  if (!(pi_lmin > 0.0 && pi_lmin <= 1.0)) {
    throw DomainError("pi_lmin must lie in (0,1]");
  }
  auto scaled = [pi_lmin](double x, const char* what) {
    const double s = pi_lmin * x;
    if (!(s >= -kScaledTolerance && s <= 1.0 + kScaledTolerance)) {
      throw ContractError(std::string(what) + " scaled by pi_lmin is " +
                          std::to_string(s) + ", outside [0,1]");
    }
    return std::clamp(s, 0.0, 1.0);
  };
  const double p = scaled(r_hat_rho, "R_hat(rho)");
  const double q = scaled(r_rho, "R(rho)");
  return make_certificate(bernoulli_kl(p, q), thm2_kl_rhs(kl_rho_mu, t, delta));
}

// sqrt(2 t^2 (2 ln(t+1) + ln(2/delta)) / sum_tau pi_tau^{-2}).
inline double lambda_opt_from_sum(std::size_t t, double delta, double sum_inv_sq) {
  detail::require_round(t);
  detail::require_delta(delta);
  if (!(sum_inv_sq > 0.0)) throw DomainError("sum of pi^-2 must be positive");
  const double td = static_cast<double>(t);
  return std::sqrt(2.0 * td * td * detail::log_term_martingale(t, delta) / sum_inv_sq);
}

inline double sum_inverse_squares(std::span<const double> pi_min_seq) {
  double s = 0.0;
  for (double p : pi_min_seq) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("pi_min entries must lie in (0,1]");
    s += 1.0 / (p * p);
  }
  return s;
}

/// lambda_t for uniform weights, minimizing the KL-free part of the gap.
inline double lambda_opt(std::size_t t, double delta, std::span<const double> pi_min_seq) {
  if (pi_min_seq.size() != t) {
    throw DimensionError("pi_min sequence must have t entries");
  }
  return lambda_opt_from_sum(t, delta, sum_inverse_squares(pi_min_seq));
}

/// Right-hand side of the martingale-based bound with general weights:
/// (KL + lambda^2/2 sum (w/pi_min)^2 + 2 ln(t+1) + ln(2/delta)) /
/// (lambda sum w).
inline double thm3_gap(double kl_rho_mu, std::size_t t, double delta, double lambda,
                       std::span<const double> weights,
                       std::span<const double> pi_min_seq) {
  detail::require_round(t);
  detail::require_delta(delta);
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (weights.size() != t || pi_min_seq.size() != t) {
    throw DimensionError("weights and pi_min sequences must have t entries");
  }
  double weight_sum = 0.0, penalty = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    if (!(weights[i] >= 0.0)) throw DomainError("weights must be nonnegative");
    if (!(pi_min_seq[i] > 0.0)) throw DomainError("pi_min entries must be positive");
    weight_sum += weights[i];
    const double r = weights[i] / pi_min_seq[i];
    penalty += r * r;
  }
  if (!(weight_sum > 0.0)) throw DomainError("weights must have a positive sum");
  return (kl_rho_mu + 0.5 * lambda * lambda * penalty +
          detail::log_term_martingale(t, delta)) /
         (lambda * weight_sum);
}

// thm3_gap with w_tau = 1/t, given sum_tau pi_tau^{-2}.
inline double thm3_gap_uniform(double kl_rho_mu, std::size_t t, double delta,
                               double lambda, double sum_inv_sq) {
  detail::require_round(t);
  detail::require_delta(delta);
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const double td = static_cast<double>(t);
  return (kl_rho_mu + 0.5 * lambda * lambda * sum_inv_sq / (td * td) +
          detail::log_term_martingale(t, delta)) /
         lambda;
}

/// Closed form of thm3_gap_uniform at lambda_opt:
/// sqrt(S / (2 t^2)) (KL / sqrt(L) + 2 sqrt(L)), S = sum pi^-2,
/// L = 2 ln(t+1) + ln(2/delta).
inline double thm3_closed_form(double kl_rho_mu, std::size_t t, double delta,
                               double sum_inv_sq) {
  detail::require_round(t);
  detail::require_delta(delta);
  const double td = static_cast<double>(t);
  const double l = detail::log_term_martingale(t, delta);
  return std::sqrt(sum_inv_sq / (2.0 * td * td)) *
         (kl_rho_mu / std::sqrt(l) + 2.0 * std::sqrt(l));
}

/// The closed form with L' = ln(t+1) + ln(2/delta) and a unit coefficient on
/// sqrt(L'), as it is commonly quoted. It is smaller than the gap at
/// lambda_opt, so it is kept for reporting only.
inline double thm3_closed_form_as_printed(double kl_rho_mu, std::size_t t, double delta,
                                          double sum_inv_sq) {
  detail::require_round(t);
  detail::require_delta(delta);
  const double td = static_cast<double>(t);
  const double l = std::log(td + 1.0) + std::log(2.0 / delta);
  return std::sqrt(sum_inv_sq / td / (2.0 * td)) *
         (kl_rho_mu / std::sqrt(l) + std::sqrt(l));
}

// |R_hat(rho) - R(rho)| <= gap.
inline Certificate thm3_certificate(double r_hat_rho, double r_rho, double gap) {
  return make_certificate(std::abs(r_hat_rho - r_rho), gap);
}

/// Per-round regret envelope of the smoothed Gibbs strategy, valid for
/// t >= K^3:
/// K^{3/4} (t+1)^{-1/4} (2.5 + sqrt((ln K + 3 ln(t+1) - ln delta) / 2K)
///                          + sqrt((3 ln(t+1) - ln delta) / 2K)).
inline double regret_bound_thm4(std::size_t k, std::size_t t, double delta) {
  detail::require_delta(delta);
  if (k < 2) throw DomainError("regret bound needs K >= 2");
  if (t < default_warmup_length(k)) {
    throw DomainError("regret bound applies only for t >= K^3");
  }
  const double kd = static_cast<double>(k);
  const double l3 = detail::log_term3(t, delta);
  return std::pow(kd, 0.75) / std::pow(static_cast<double>(t) + 1.0, 0.25) *
         (2.5 + std::sqrt((std::log(kd) + l3) / (2.0 * kd)) +
          std::sqrt(l3 / (2.0 * kd)));
}

/// sum_i x_i e^{-alpha x_i} / sum_j e^{-alpha x_j} for x_1 = 0; at most
/// n / alpha. Exponents are shifted by min(x) so large spreads stay finite.
inline double expsum_ratio(std::span<const double> x, double alpha) {
  if (x.size() < 2) throw DomainError("expsum ratio needs n >= 2");
  if (x[0] != 0.0) throw DomainError("expsum ratio needs x_1 = 0");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  const double lo = *std::min_element(x.begin(), x.end());
  double num = 0.0, den = 0.0;
  for (double xi : x) {
    const double w = std::exp(-alpha * (xi - lo));
    num += xi * w;
    den += w;
  }
  return num / den;
}

// (g)^2 + 2 g sqrt(3 ln(t+1) - ln delta), g = gamma / (eps sqrt(2t)).
inline double kl_chain_bound(double gamma, double epsilon, std::size_t t, double delta) {
  detail::require_round(t);
  detail::require_delta(delta);
  if (!(gamma > 0.0 && epsilon > 0.0)) {
    throw DomainError("gamma and epsilon must be positive");
  }
  const double g = gamma / (epsilon * std::sqrt(2.0 * static_cast<double>(t)));
  return g * g + 2.0 * g * std::sqrt(detail::log_term3(t, delta));
}

// (1 / (eps sqrt(2t))) (gamma / (eps sqrt(2t)) + sqrt(3 ln(t+1) - ln delta)).
inline double term3_bound(double gamma, double epsilon, std::size_t t, double delta) {
  detail::require_round(t);
  detail::require_delta(delta);
  if (!(gamma > 0.0 && epsilon > 0.0)) {
    throw DomainError("gamma and epsilon must be positive");
  }
  const double scale = 1.0 / (epsilon * std::sqrt(2.0 * static_cast<double>(t)));
  return scale * (gamma * scale + std::sqrt(detail::log_term3(t, delta)));
}

/// Gibbs distribution built from the true means, mu(a) ~ exp(gamma R(a)).
/// A legal prior (it does not look at the sample) but only computable when
/// the environment is synthetic.
class SyntheticGibbsPrior {
 public:
  SyntheticGibbsPrior(const Environment& env, double gamma)
      : distribution_(gibbs_posterior(env.means(), gamma)) {}

  const SimplexVector& distribution() const { return distribution_; }

 private:
  SimplexVector distribution_;
};

struct SandwichSides {
  double lhs;  // KL(rho_exp || mu_exp)
  double rhs;  // gamma ([R_hat - R](rho_exp) + [R - R_hat](mu_exp))
};

/// Both sides of KL(rho_exp||mu_exp) <= gamma (...). The inequality is
/// deterministic (concavity of ln), not a high-probability event.
inline SandwichSides kl_sandwich_lemma(std::span<const double> r_hat,
                                       const Environment& env, double gamma) {
  if (r_hat.size() != env.arms()) throw DimensionError("estimate size does not match K");
  const auto rho = gibbs_posterior(r_hat, gamma);
  const SyntheticGibbsPrior prior(env, gamma);
  const auto& mu = prior.distribution();
  const double lhs = categorical_kl(rho, mu);
  const double rhs = gamma * ((rho.expectation(r_hat) - rho.expectation(env.means())) +
                              (mu.expectation(env.means()) - mu.expectation(r_hat)));
  return SandwichSides{lhs, rhs};
}

/// The four bracketed terms splitting R(a*) - R(rho_tilde) at round t.
struct RegretTerms {
  std::size_t t = 0;
  double estimation_best = 0.0;      // R(a*) - R_hat(a*)
  double gibbs_shortfall = 0.0;      // R_hat(a*) - R_hat(rho_exp)
  double estimation_posterior = 0.0; // R_hat(rho_exp) - R(rho_exp)
  double smoothing_cost = 0.0;       // R(rho_exp) - R(rho_tilde)
  double regret = 0.0;               // R(a*) - R(rho_tilde), computed directly
  double gamma = 0.0;
  double epsilon_next = 0.0;

  double sum() const {
    return estimation_best + gibbs_shortfall + estimation_posterior + smoothing_cost;
  }
};

inline RegretTerms regret_terms(std::size_t t, std::span<const double> r_hat,
                                const Environment& env) {
  const std::size_t k = env.arms();
  if (r_hat.size() != k) throw DimensionError("estimate size does not match K");
  const auto gamma = schedules(t, k).gamma;
  const auto eps_next = schedules(t + 1, k).epsilon;
  const auto rho = gibbs_posterior(r_hat, gamma);
  const auto rho_tilde = smooth_policy(rho, eps_next);
  const std::size_t best = env.best_arm();
  const auto means = env.means();

  RegretTerms out;
  out.t = t;
  out.gamma = gamma;
  out.epsilon_next = eps_next;
  const double r_hat_rho = rho.expectation(r_hat);
  const double r_rho = rho.expectation(means);
  out.estimation_best = means[best] - r_hat[best];
  out.gibbs_shortfall = r_hat[best] - r_hat_rho;
  out.estimation_posterior = r_hat_rho - r_rho;
  out.smoothing_cost = r_rho - rho_tilde.expectation(means);
  out.regret = means[best] - rho_tilde.expectation(means);
  return out;
}

/// Decomposition at every recorded round t >= warmup length.
inline std::vector<RegretTerms> regret_decomposition(const GameTrace& trace,
                                                     const Environment& env) {
  if (trace.arms != env.arms()) throw DimensionError("trace and environment differ in K");
  std::vector<RegretTerms> out;
  for (const auto& r : trace.rounds) {
    if (r.t < trace.warmup_length) continue;
    out.push_back(regret_terms(r.t, r.r_hat, env));
  }
  return out;
}

/// x_a = R_hat(a*) - R_hat(a) reordered so that a* comes first; term 2 of
/// the decomposition equals expsum_ratio(x, gamma).
inline std::vector<double> shortfall_offsets(std::span<const double> r_hat,
                                             std::size_t best) {
  std::vector<double> x;
  x.reserve(r_hat.size());
  x.push_back(0.0);
  for (std::size_t a = 0; a < r_hat.size(); ++a) {
    if (a != best) x.push_back(r_hat[best] - r_hat[a]);
  }
  return x;
}

struct DriverRow {
  std::size_t t;
  double inv_pi_lmin;     // 1 / min_{tau<=t} pi_tau^min
  double rms_inv_pi_min;  // sqrt((1/t) sum_{tau<=t} pi_tau^min^-2)
};

/// The two scale statistics driving the thm2 and thm3 gaps.
inline std::vector<DriverRow> driver_statistics(std::span<const double> pi_min_seq) {
  std::vector<DriverRow> out;
  out.reserve(pi_min_seq.size());
  double running_min = kInfinity, sum_inv_sq = 0.0;
  for (std::size_t i = 0; i < pi_min_seq.size(); ++i) {
    const double p = pi_min_seq[i];
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("pi_min entries must lie in (0,1]");
    running_min = std::min(running_min, p);
    sum_inv_sq += 1.0 / (p * p);
    out.push_back(DriverRow{i + 1, 1.0 / running_min,
                            std::sqrt(sum_inv_sq / static_cast<double>(i + 1))});
  }
  return out;
}

struct ComparisonRow {
  std::size_t t;
  double thm2_gap;
  double thm3_gap;
  double inv_pi_lmin;
  double rms_inv_pi_min;
};

/// thm2 (L1 form) and thm3 (uniform weights at lambda_opt) gaps for
/// rho_t^exp against the uniform prior, with the drivers taken from the
/// trace's realized pi_tau^min.
inline std::vector<ComparisonRow> compare_thm2_thm3(const GameTrace& trace, double delta) {
  if (trace.rounds.empty()) throw DomainError("comparison needs a nonempty trace");
  std::vector<double> pi_min;
  pi_min.reserve(trace.rounds.size());
  for (const auto& r : trace.rounds) pi_min.push_back(r.policy.min());
  const auto drivers = driver_statistics(pi_min);
  const auto prior = SimplexVector::uniform(trace.arms);

  std::vector<ComparisonRow> out;
  out.reserve(trace.rounds.size());
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const auto& r = trace.rounds[i];
    const auto& d = drivers[i];
    const double gamma = schedules(r.t, trace.arms).gamma;
    const double kl = categorical_kl(gibbs_posterior(r.r_hat, gamma), prior);
    const double td = static_cast<double>(r.t);
    const double sum_inv_sq = d.rms_inv_pi_min * d.rms_inv_pi_min * td;
    out.push_back(ComparisonRow{r.t, thm2_l1_gap(kl, r.t, delta, 1.0 / d.inv_pi_lmin),
                                thm3_closed_form(kl, r.t, delta, sum_inv_sq),
                                d.inv_pi_lmin, d.rms_inv_pi_min});
  }
  return out;
}

}  // namespace pacbandit

#endif  // PACBANDIT_PAC_BOUNDS_HPP_
