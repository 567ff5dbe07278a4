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

#ifndef PACBANDIT_CONCENTRATION_HPP_
#define PACBANDIT_CONCENTRATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pacbandit/certificate.hpp"
#include "pacbandit/divergences.hpp"
#include "pacbandit/error.hpp"
#include "pacbandit/rng.hpp"

namespace pacbandit {

// Paths an exact expectation may enumerate before refusing.
inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;
// Transition-table entries a chain may store.
inline constexpr std::uint64_t kChainTableBudget = 4'000'000;
inline constexpr int kMaxMomentLength = 25;
inline constexpr double kConditionalMeanTolerance = 1e-12;

namespace detail {

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0,1), got " + std::to_string(delta));
  }
}

// base^exponent, saturating at UINT64_MAX.
inline std::uint64_t saturating_pow(std::uint64_t base, std::size_t exponent) {
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > UINT64_MAX / base) return UINT64_MAX;
    result *= base;
  }
  return result;
}

}  // namespace detail

// With probability > 1 - delta, a nonnegative X is at most E[X] / delta.
inline double markov_bound(double expectation, double delta) {
  detail::require_delta(delta);
  if (!(expectation >= 0.0)) {
    throw DomainError("Markov's inequality needs a nonnegative expectation");
  }
  return expectation / delta;
}

/// E[exp(N kl(S_hat || p))] for S_hat the mean of N i.i.d. Bernoulli(p),
/// summed exactly over the N + 1 values of S_hat.
///
/// Zero-probability outcomes contribute nothing even when their kl is
/// infinite (p in {0, 1}).
inline double bernoulli_kl_moment(int n, double p) {
  if (n < 1) throw DomainError("moment needs N >= 1");
  if (n > kMaxMomentLength) {
    throw BudgetError("exact moment enumeration is limited to N <= " +
                      std::to_string(kMaxMomentLength));
  }
  detail::require_unit(p, "p");
  const double nd = static_cast<double>(n);
  double total = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    if ((p == 0.0 && k > 0) || (p == 1.0 && k < n)) continue;
    const double log_choose =
        std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
    double log_mass = log_choose;
    if (k > 0) log_mass += kd * std::log(p);
    if (k < n) log_mass += (nd - kd) * std::log1p(-p);
    total += std::exp(log_mass + nd * bernoulli_kl(kd / nd, p));
  }
  return total;
}

// Whether the sharper window sqrt(N) <= moment <= 2 sqrt(N) holds; reported
// alongside the contractual N + 1 bound, never enforced.
inline bool sharp_moment_window_holds(int n, double p) {
  const double m = bernoulli_kl_moment(n, p);
  const double root = std::sqrt(static_cast<double>(n));
  return m >= root && m <= 2.0 * root;
}

using PathFunction = std::function<double(std::span<const double>)>;

/// A [0,1]-valued process X_1..X_N on a finite support whose conditional mean
/// given any history is the same constant p.
///
/// The transition rule is tabulated for every history prefix at construction
/// and each conditional distribution is checked to lie on the simplex with
/// mean p (tolerance 1e-12). Chains violating the constant-mean hypothesis
/// are rejected.
class DependentChainSpec {
 public:
  // Maps a history prefix (support indices of X_1..X_d) to a probability
  // vector over the support for X_{d+1}.
  using Transition =
      std::function<std::vector<double>(std::span<const std::size_t>)>;

  DependentChainSpec(std::size_t length, std::vector<double> support,
                     double mean, const Transition& transition)
      : length_(length), support_(std::move(support)), mean_(mean) {
    if (length_ == 0) throw DomainError("chain length must be positive");
    if (support_.empty()) throw DomainError("chain support is empty");
    for (double v : support_) detail::require_unit(v, "support value");
    detail::require_unit(mean_, "mean");

    const std::uint64_t s = support_.size();
    std::uint64_t entries = 0;
    for (std::size_t d = 0; d < length_; ++d) {
      const std::uint64_t level = detail::saturating_pow(s, d + 1);
      entries = (level == UINT64_MAX) ? UINT64_MAX : entries + level;
      if (entries > kChainTableBudget) {
        throw BudgetError("chain transition table exceeds " +
                          std::to_string(kChainTableBudget) + " entries");
      }
    }

    tables_.resize(length_);
    std::vector<std::size_t> prefix;
    for (std::size_t d = 0; d < length_; ++d) {
      const std::size_t prefixes = detail::saturating_pow(s, d);
      tables_[d].reserve(prefixes * s);
      prefix.assign(d, 0);
      for (std::size_t index = 0; index < prefixes; ++index) {
        decode(index, prefix);
        std::vector<double> probs = transition(prefix);
        validate(probs, d);
        tables_[d].insert(tables_[d].end(), probs.begin(), probs.end());
      }
    }
  }

  /// I.i.d. chain: every step draws from `probs` regardless of history.
  static DependentChainSpec iid(std::size_t length, std::vector<double> support,
                                const std::vector<double>& probs) {
    if (probs.size() != support.size()) {
      throw DimensionError("probabilities and support differ in size");
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) mean += probs[i] * support[i];
    mean = std::clamp(mean, 0.0, 1.0);
    return DependentChainSpec(length, std::move(support), mean,
                              [&](std::span<const std::size_t>) { return probs; });
  }

  std::size_t length() const { return length_; }
  std::span<const double> support() const { return support_; }
  double mean() const { return mean_; }

  std::uint64_t path_count() const {
    return detail::saturating_pow(support_.size(), length_);
  }

  // Distribution of X_{d+1} given the prefix (of length d).
  std::span<const double> conditional(std::span<const std::size_t> prefix) const {
    if (prefix.size() >= length_) throw DimensionError("prefix too long");
    std::size_t index = 0;
    for (std::size_t v : prefix) {
      if (v >= support_.size()) throw DimensionError("support index out of range");
      index = index * support_.size() + v;
    }
    const auto& table = tables_[prefix.size()];
    return std::span<const double>(table).subspan(index * support_.size(),
                                                  support_.size());
  }

 private:
  void decode(std::size_t index, std::vector<std::size_t>& prefix) const {
    for (std::size_t i = prefix.size(); i-- > 0;) {
      prefix[i] = index % support_.size();
      index /= support_.size();
    }
  }

  void validate(const std::vector<double>& probs, std::size_t depth) const {
    if (probs.size() != support_.size()) {
      throw DimensionError("transition returned " + std::to_string(probs.size()) +
                           " probabilities for a support of " +
                           std::to_string(support_.size()));
    }
    double total = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
        throw DomainError("transition probabilities must be nonnegative");
      }
      total += probs[i];
      mean += probs[i] * support_[i];
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      throw DomainError("conditional distribution at depth " +
                        std::to_string(depth) + " sums to " + std::to_string(total));
    }
    if (std::abs(mean - mean_) > kConditionalMeanTolerance) {
      throw DomainError("conditional mean at depth " + std::to_string(depth) +
                        " is " + std::to_string(mean) + ", expected " +
                        std::to_string(mean_));
    }
  }

  std::size_t length_;
  std::vector<double> support_;
  double mean_;
  // tables_[d] holds |support|^d conditional distributions laid out by
  // prefix index (base-|support| digits, oldest first).
  std::vector<std::vector<double>> tables_;
};

namespace detail {

inline void enumerate_chain(const DependentChainSpec& chain, const PathFunction& f,
                            std::vector<std::size_t>& prefix,
                            std::vector<double>& values, double mass,
                            double& total) {
  if (prefix.size() == chain.length()) {
    total += mass * f(values);
    return;
  }
  const auto probs = chain.conditional(prefix);
  const auto support = chain.support();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    prefix.push_back(i);
    values.push_back(support[i]);
    enumerate_chain(chain, f, prefix, values, mass * probs[i], total);
    prefix.pop_back();
    values.pop_back();
  }
}

}  // namespace detail

// E f(X_1..X_N) by exhaustive enumeration of the chain's paths.
inline double dependent_convex_expectation(const DependentChainSpec& chain,
                                           const PathFunction& f) {
  if (chain.path_count() > kEnumerationBudget) {
    throw BudgetError("chain has " + std::to_string(chain.path_count()) +
                      " paths, budget is " + std::to_string(kEnumerationBudget));
  }
  std::vector<std::size_t> prefix;
  std::vector<double> values;
  prefix.reserve(chain.length());
  values.reserve(chain.length());
  double total = 0.0;
  detail::enumerate_chain(chain, f, prefix, values, 1.0, total);
  return total;
}

// E f(Y_1..Y_N) for i.i.d. Bernoulli(p) by enumerating {0,1}^N.
inline double bernoulli_counterpart_expectation(std::size_t length, double p,
                                                const PathFunction& f) {
  detail::require_unit(p, "p");
  if (length == 0) throw DomainError("length must be positive");
  if (detail::saturating_pow(2, length) > kEnumerationBudget) {
    throw BudgetError("Bernoulli enumeration over 2^" + std::to_string(length) +
                      " paths exceeds the budget");
  }
  const std::uint64_t paths = std::uint64_t{1} << length;
  std::vector<double> y(length);
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < paths; ++bits) {
    double mass = 1.0;
    for (std::size_t i = 0; i < length; ++i) {
      const bool one = (bits >> i) & 1U;
      y[i] = one ? 1.0 : 0.0;
      mass *= one ? p : 1.0 - p;
    }
    if (mass == 0.0) continue;
    total += mass * f(y);
  }
  return total;
}

/// E_Bernoulli f - E_chain f. Nonnegative (up to rounding) for convex f
/// whenever the chain has constant conditional mean.
inline double lemma1_gap(const DependentChainSpec& chain, const PathFunction& f) {
  const double chain_value = dependent_convex_expectation(chain, f);
  return bernoulli_counterpart_expectation(chain.length(), chain.mean(), f) -
         chain_value;
}

struct ConvexTestFunction {
  std::string name;
  PathFunction f;
};

/// The fixed convex family used by the oracle sweeps: max_i x_i,
/// (sum_i x_i)^2 and exp(N kl(mean(x) || p)).
inline std::vector<ConvexTestFunction> convex_test_family(double p) {
  detail::require_unit(p, "p");
  return {
      {"max",
       [](std::span<const double> x) { return *std::max_element(x.begin(), x.end()); }},
      {"squared_sum",
       [](std::span<const double> x) {
         const double s = std::accumulate(x.begin(), x.end(), 0.0);
         return s * s;
       }},
      {"exp_n_kl",
       [p](std::span<const double> x) {
         const double n = static_cast<double>(x.size());
         const double mean =
             std::clamp(std::accumulate(x.begin(), x.end(), 0.0) / n, 0.0, 1.0);
         return std::exp(n * bernoulli_kl(mean, p));
       }},
  };
}

/// Stochastic convexity screen for user-supplied functions: checks
/// f((x+y)/2) <= (f(x)+f(y))/2 on random pairs in [0,1]^N. Passing does not
/// prove convexity.
inline bool passes_midpoint_convexity(const PathFunction& f, std::size_t length,
                                      Engine& rng, int trials = 1000) {
  std::vector<double> x(length), y(length), mid(length);
  for (int trial = 0; trial < trials; ++trial) {
    for (std::size_t i = 0; i < length; ++i) {
      x[i] = uniform01(rng);
      y[i] = uniform01(rng);
      mid[i] = 0.5 * (x[i] + y[i]);
    }
    const double fx = f(x), fy = f(y), fm = f(mid);
    const double scale = std::max({1.0, std::abs(fx), std::abs(fy)});
    if (fm > 0.5 * (fx + fy) + 1e-12 * scale) return false;
  }
  return true;
}

/// Random chain with 2..max_support support points and length 1..max_length
/// whose conditional distributions are drawn independently per prefix
/// (hence genuinely history-dependent) subject to mean p.
inline DependentChainSpec random_chain(Engine& rng, std::size_t max_length,
                                       std::size_t max_support) {
  if (max_length == 0 || max_support < 2) {
    throw DomainError("random chains need length >= 1 and support >= 2");
  }
  const std::size_t length = 1 + static_cast<std::size_t>(uniform01(rng) * max_length);
  const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * (max_support - 1));
  const double p = 0.05 + 0.9 * uniform01(rng);

  // Support straddles p: the lowest point is below it and the highest above.
  std::vector<double> support(k);
  support[0] = p * uniform01(rng);
  support[k - 1] = p + (1.0 - p) * (1.0 - uniform01(rng));
  for (std::size_t i = 1; i + 1 < k; ++i) support[i] = uniform01(rng);
  std::sort(support.begin(), support.end());
  const double lo = support.front();
  const double hi = support.back();

  // Every conditional: random mass on the interior points, shrunk until the
  // two end points can restore mean p, then solved for the end masses.
  auto draw = [&](std::span<const std::size_t>) {
    std::vector<double> probs(k, 0.0);
    double interior_mass = 0.0, interior_moment = 0.0;
    for (std::size_t i = 1; i + 1 < k; ++i) {
      probs[i] = uniform01(rng);
      interior_mass += probs[i];
      interior_moment += probs[i] * support[i];
    }
    double scale = 1.0;
    if (interior_mass > 0.0) {
      // Feasible iff lo*(1-m) <= p - moment <= hi*(1-m) after scaling by s.
      const double cap_total = 1.0 / interior_mass;
      double cap = cap_total * uniform01(rng);
      const double below = interior_moment - lo * interior_mass;
      const double above = hi * interior_mass - interior_moment;
      if (below > 0.0) cap = std::min(cap, (p - lo) / below);
      if (above > 0.0) cap = std::min(cap, (hi - p) / above);
      scale = std::max(0.0, cap);
    }
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 1; i + 1 < k; ++i) {
      probs[i] *= scale;
      mass += probs[i];
      moment += probs[i] * support[i];
    }
    const double rest = 1.0 - mass;
    const double q_hi = std::clamp((p - moment - lo * rest) / (hi - lo), 0.0, rest);
    probs[k - 1] = q_hi;
    probs[0] = rest - q_hi;
    return probs;
  };
  return DependentChainSpec(length, support, p, draw);
}

/// Per-step increment ranges X_i in [a_i, b_i] of a martingale difference
/// sequence, with a_i <= 0 <= b_i.
class MartingaleRange {
 public:
  MartingaleRange(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) {
      throw DimensionError("lower and upper range lists differ in length");
    }
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!(lower_[i] <= 0.0 && upper_[i] >= 0.0)) {
        throw DomainError("martingale ranges need a_i <= 0 <= b_i");
      }
    }
  }

  static MartingaleRange constant(std::size_t n, double a, double b) {
    return MartingaleRange(std::vector<double>(n, a), std::vector<double>(n, b));
  }

  std::size_t size() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }

  // a = min_i a_i, b = max_i b_i.
  double min_lower() const { return *std::min_element(lower_.begin(), lower_.end()); }
  double max_upper() const { return *std::max_element(upper_.begin(), upper_.end()); }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

namespace detail {

inline void require_range(double a, double b) {
  if (!(a <= 0.0 && b >= 0.0)) throw DomainError("need a <= 0 <= b");
  if (!(a < b)) throw DomainError("degenerate martingale range a == b");
}

}  // namespace detail

// ln((N+1)/delta) / N.
inline double azuma_alt_kl_rhs(std::size_t n, double delta) {
  detail::require_delta(delta);
  if (n == 0) throw DomainError("N must be positive");
  const double nd = static_cast<double>(n);
  return std::log((nd + 1.0) / delta) / nd;
}

/// kl(z_bar || -a/(b-a)) <= ln((N+1)/delta)/N, where z_bar is the mean of the
/// rescaled increments Z_i = (X_i - a)/(b - a).
inline Certificate azuma_alt_kl_certificate(double z_bar, std::size_t n, double a,
                                            double b, double delta) {
  detail::require_range(a, b);
  detail::require_unit(z_bar, "z_bar");
  const double center = -a / (b - a);
  return make_certificate(bernoulli_kl(z_bar, center), azuma_alt_kl_rhs(n, delta));
}

// |S_N| <= (b - a) sqrt(N ln((N+1)/delta) / 2).
inline double azuma_alt_bound(std::size_t n, double a, double b, double delta) {
  detail::require_range(a, b);
  const double rhs = azuma_alt_kl_rhs(n, delta);
  const double nd = static_cast<double>(n);
  return (b - a) * std::sqrt(nd * nd * rhs / 2.0);
}

inline double azuma_alt_bound(const MartingaleRange& ranges, double delta) {
  if (ranges.size() == 0) throw DomainError("empty martingale range");
  return azuma_alt_bound(ranges.size(), ranges.min_lower(), ranges.max_upper(),
                         delta);
}

// |S_N| <= sqrt(sum_i (b_i - a_i)^2 ln(2/delta) / 2).
inline double hoeffding_azuma_bound(const MartingaleRange& ranges, double delta) {
  detail::require_delta(delta);
  if (ranges.size() == 0) throw DomainError("empty martingale range");
  double squares = 0.0;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const double w = ranges.upper()[i] - ranges.lower()[i];
    squares += w * w;
  }
  return std::sqrt(0.5 * squares * std::log(2.0 / delta));
}

/// Two-point martingale: X_i = b_i with probability -a_i/(b_i - a_i), else
/// a_i. With a_i = -c, b_i = c this is the symmetric +-c random walk.
/// Returns S_N.
inline double simulate_two_point_martingale(Engine& rng, const MartingaleRange& ranges) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const double a = ranges.lower()[i];
    const double b = ranges.upper()[i];
    if (a == b) continue;
    sum += bernoulli(rng, -a / (b - a)) ? b : a;
  }
  return sum;
}

/// History-dependent martingale shaped like one arm's importance-weighted
/// reward: at step i the arm is played with probability pi_i, which drifts
/// with the running sum, and X_i = I_i r_i / pi_i - mean with r_i ~
/// Bernoulli(mean). Conditional mean is zero for every history.
class ImportanceWeightedMartingale {
 public:
  ImportanceWeightedMartingale(std::size_t length, double reward_mean, double pi_floor)
      : length_(length), reward_mean_(reward_mean), pi_floor_(pi_floor) {
    detail::require_unit(reward_mean, "reward_mean");
    if (!(pi_floor > 0.0 && pi_floor <= 0.5)) {
      throw DomainError("pi_floor must lie in (0, 0.5]");
    }
  }

  // Predictable per-step ranges: X_i in [-mean, 1/pi_floor - mean].
  MartingaleRange ranges() const {
    return MartingaleRange::constant(length_, -reward_mean_,
                                     1.0 / pi_floor_ - reward_mean_);
  }

  double simulate(Engine& rng) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < length_; ++i) {
      const double pi =
          std::clamp(0.5 + 0.45 * std::tanh(sum), pi_floor_, 1.0 - pi_floor_);
      double x = -reward_mean_;
      if (bernoulli(rng, pi) && bernoulli(rng, reward_mean_)) x += 1.0 / pi;
      sum += x;
    }
    return sum;
  }

 private:
  std::size_t length_;
  double reward_mean_;
  double pi_floor_;
};

}  // namespace pacbandit

#endif  // PACBANDIT_CONCENTRATION_HPP_
