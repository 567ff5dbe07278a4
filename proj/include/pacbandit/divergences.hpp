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

#ifndef PACBANDIT_DIVERGENCES_HPP_
#define PACBANDIT_DIVERGENCES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pacbandit/error.hpp"

namespace pacbandit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Simplex entries must sum to 1 within this tolerance after construction.
inline constexpr double kSimplexTolerance = 1e-12;
// Larger deviations than this are rejected rather than renormalized.
inline constexpr double kRenormalizeTolerance = 1e-9;

inline constexpr double kInverseTolerance = 1e-12;
inline constexpr int kInverseMaxIterations = 200;

namespace detail {

inline bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

inline void require_unit(double x, const char* name) {
  if (!in_unit_interval(x)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " +
                      std::to_string(x));
  }
}

// x * ln(x / y) with 0 ln 0 = 0 and x ln(x / 0) = +inf for x > 0.
inline double xlogxy(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInfinity;
  return x * std::log(x / y);
}

}  // namespace detail

// Pair of Bernoulli biases: p is the empirical side, q the reference side.
struct BernoulliPair {
  double p;
  double q;

  BernoulliPair(double p_in, double q_in) : p(p_in), q(q_in) {
    detail::require_unit(p, "p");
    detail::require_unit(q, "q");
  }
};

/// A probability distribution over K arms.
///
/// Construction rejects negative or non-finite entries and any vector whose
/// sum is further than 1e-9 from one. Sums off by more than 1e-12 (but within
/// 1e-9) are renormalized; anything closer is kept bit-for-bit.
class SimplexVector {
 public:
  explicit SimplexVector(std::vector<double> weights)
      : weights_(std::move(weights)) {
    if (weights_.empty()) {
      throw DimensionError("simplex vector needs at least one arm");
    }
    for (double w : weights_) {
      if (!std::isfinite(w) || w < 0.0) {
        throw DomainError("simplex entries must be finite and nonnegative");
      }
    }
    const double total = sum();
    if (std::abs(total - 1.0) > kRenormalizeTolerance) {
      throw DomainError("simplex entries sum to " + std::to_string(total));
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      for (double& w : weights_) w /= total;
    }
  }

  static SimplexVector uniform(std::size_t k) {
    if (k == 0) throw DimensionError("uniform distribution over zero arms");
    return SimplexVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static SimplexVector point_mass(std::size_t k, std::size_t arm) {
    if (arm >= k) throw DimensionError("point mass arm out of range");
    std::vector<double> w(k, 0.0);
    w[arm] = 1.0;
    return SimplexVector(std::move(w));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t a) const { return weights_[a]; }
  std::span<const double> weights() const { return weights_; }
  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

  double min() const { return *std::min_element(begin(), end()); }

  // E_{a ~ this}[values(a)].
  double expectation(std::span<const double> values) const {
    if (values.size() != size()) {
      throw DimensionError("expectation over mismatched arm count");
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < size(); ++a) acc += weights_[a] * values[a];
    return acc;
  }

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  double sum() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  std::vector<double> weights_;
};

// kl(p || q) between Bernoulli biases. +inf when q is 0 or 1 and p != q.
inline double bernoulli_kl(const BernoulliPair& pair) {
  const double value = detail::xlogxy(pair.p, pair.q) +
                       detail::xlogxy(1.0 - pair.p, 1.0 - pair.q);
  return std::max(0.0, value);
}

inline double bernoulli_kl(double p, double q) {
  return bernoulli_kl(BernoulliPair(p, q));
}

// KL(rho || mu) over a common arm set.
inline double categorical_kl(const SimplexVector& rho, const SimplexVector& mu) {
  if (rho.size() != mu.size()) {
    throw DimensionError("KL between distributions over " +
                         std::to_string(rho.size()) + " and " +
                         std::to_string(mu.size()) + " arms");
  }
  double acc = 0.0;
  for (std::size_t a = 0; a < rho.size(); ++a) {
    acc += detail::xlogxy(rho[a], mu[a]);
    if (acc == kInfinity) return kInfinity;
  }
  return std::max(0.0, acc);
}

namespace detail {

inline void require_budget(double c) {
  if (std::isnan(c) || c < 0.0) {
    throw DomainError("kl budget must be nonnegative");
  }
}

// Bisection for the boundary of {q : kl(p_hat || q) <= c} between `inside`
// (feasible) and `outside` (infeasible). Returns the feasible endpoint.
inline double kl_boundary(double p_hat, double c, double inside,
                          double outside, double tolerance) {
  for (int it = 0; it < kInverseMaxIterations; ++it) {
    if (std::abs(outside - inside) <= tolerance) break;
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (bernoulli_kl(p_hat, mid) <= c) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace detail

/// Largest q in [p_hat, 1] with kl(p_hat || q) <= c.
///
/// kl(p_hat || .) is increasing on [p_hat, 1], so bisection converges to the
/// unique crossing. The returned point is always feasible and lies within
/// `tolerance` of the exact crossing.
inline double kl_upper_inverse(double p_hat, double c,
                               double tolerance = kInverseTolerance) {
  detail::require_unit(p_hat, "p_hat");
  detail::require_budget(c);
  if (c == 0.0 || p_hat == 1.0) return p_hat;
  if (bernoulli_kl(p_hat, 1.0) <= c) return 1.0;
  return detail::kl_boundary(p_hat, c, p_hat, 1.0, tolerance);
}

// Smallest q in [0, p_hat] with kl(p_hat || q) <= c.
inline double kl_lower_inverse(double p_hat, double c,
                               double tolerance = kInverseTolerance) {
  detail::require_unit(p_hat, "p_hat");
  detail::require_budget(c);
  if (c == 0.0 || p_hat == 0.0) return p_hat;
  if (bernoulli_kl(p_hat, 0.0) <= c) return 0.0;
  return detail::kl_boundary(p_hat, c, p_hat, 0.0, tolerance);
}

// |p - q| <= sqrt(kl(p || q) / 2).
inline double pinsker_gap(double c) {
  detail::require_budget(c);
  return std::sqrt(c / 2.0);
}

}  // namespace pacbandit

#endif  // PACBANDIT_DIVERGENCES_HPP_
