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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pacbandit/divergences.hpp"
#include "pacbandit/error.hpp"

namespace pacbandit {
namespace {

TEST(BernoulliKl, ReferenceValues) {
  EXPECT_NEAR(bernoulli_kl(0.5, 0.25), 0.14384103622589046, 1e-15);
  EXPECT_NEAR(bernoulli_kl(0.6, 0.5), 0.020135513550688873, 1e-15);
  EXPECT_NEAR(bernoulli_kl(0.75, 0.5), 0.13081203594113696, 1e-15);
  EXPECT_EQ(bernoulli_kl(0.3, 0.3), 0.0);
}

TEST(BernoulliKl, BoundaryConventions) {
  EXPECT_EQ(bernoulli_kl(0.0, 0.0), 0.0);
  EXPECT_EQ(bernoulli_kl(1.0, 1.0), 0.0);
  EXPECT_NEAR(bernoulli_kl(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_EQ(bernoulli_kl(0.5, 0.0), kInfinity);
  EXPECT_EQ(bernoulli_kl(0.5, 1.0), kInfinity);
}

TEST(BernoulliKl, RejectsOutOfRange) {
  EXPECT_THROW(bernoulli_kl(-0.1, 0.5), DomainError);
  EXPECT_THROW(bernoulli_kl(0.5, 1.5), DomainError);
  EXPECT_THROW(bernoulli_kl(std::nan(""), 0.5), DomainError);
}

TEST(BernoulliKl, PinskerOnGrid) {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double p = i / 100.0, q = j / 100.0;
      EXPECT_GE(bernoulli_kl(p, q), 2.0 * (p - q) * (p - q)) << p << " " << q;
    }
  }
}

TEST(BernoulliKl, JointConvexityOnRandomPairs) {
  std::uint64_t s = 7;
  auto next = [&] {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return 0.01 + 0.98 * static_cast<double>(s >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < 2000; ++i) {
    const double p1 = next(), q1 = next(), p2 = next(), q2 = next(), l = next();
    const double mixed = bernoulli_kl(l * p1 + (1 - l) * p2, l * q1 + (1 - l) * q2);
    EXPECT_LE(mixed, l * bernoulli_kl(p1, q1) + (1 - l) * bernoulli_kl(p2, q2) + 1e-14);
  }
}

TEST(SimplexVector, ValidatesInput) {
  EXPECT_THROW(SimplexVector({}), DimensionError);
  EXPECT_THROW(SimplexVector({0.5, -0.1, 0.6}), DomainError);
  EXPECT_THROW(SimplexVector({0.5, 0.6}), DomainError);
  EXPECT_THROW(SimplexVector({0.5, std::nan("")}), DomainError);
  EXPECT_NO_THROW(SimplexVector({0.5, 0.5 + 1e-10}));
}

TEST(SimplexVector, RenormalizationIsIdempotent) {
  const SimplexVector v({0.3, 0.7 + 5e-10});
  const SimplexVector again(std::vector<double>(v.begin(), v.end()));
  EXPECT_TRUE(v == again);
  EXPECT_NEAR(v[0] + v[1], 1.0, 1e-15);
}

TEST(SimplexVector, Helpers) {
  const auto u = SimplexVector::uniform(4);
  EXPECT_DOUBLE_EQ(u[2], 0.25);
  EXPECT_DOUBLE_EQ(u.min(), 0.25);
  const auto d = SimplexVector::point_mass(3, 1);
  const std::vector<double> values{0.2, 0.7, 0.1};
  EXPECT_DOUBLE_EQ(d.expectation(values), 0.7);
  EXPECT_THROW(SimplexVector::point_mass(3, 3), DimensionError);
  EXPECT_THROW(u.expectation(values), DimensionError);
}

TEST(CategoricalKl, Values) {
  const auto u = SimplexVector::uniform(4);
  EXPECT_EQ(categorical_kl(u, u), 0.0);
  EXPECT_NEAR(categorical_kl(SimplexVector::point_mass(4, 0), u), std::log(4.0), 1e-15);
  EXPECT_EQ(categorical_kl(u, SimplexVector::point_mass(4, 0)), kInfinity);
  EXPECT_NEAR(categorical_kl(SimplexVector({0.5, 0.5}), SimplexVector({0.25, 0.75})),
              bernoulli_kl(0.5, 0.25), 1e-15);
  EXPECT_THROW(categorical_kl(u, SimplexVector::uniform(3)), DimensionError);
}

TEST(KlInverse, ReferenceValues) {
  EXPECT_NEAR(kl_upper_inverse(0.3, 0.1), 0.5210276120682475, 1e-11);
  EXPECT_NEAR(kl_lower_inverse(0.7, 0.1), 0.4789723879317525, 1e-11);
  EXPECT_NEAR(kl_upper_inverse(0.3, 0.5), 0.7713823286075751, 1e-11);
}

TEST(KlInverse, EdgeCases) {
  EXPECT_EQ(kl_upper_inverse(0.4, 0.0), 0.4);
  EXPECT_EQ(kl_lower_inverse(0.4, 0.0), 0.4);
  EXPECT_EQ(kl_upper_inverse(1.0, 0.3), 1.0);
  EXPECT_EQ(kl_lower_inverse(0.0, 0.3), 0.0);
  EXPECT_EQ(kl_upper_inverse(0.5, kInfinity), 1.0);
  EXPECT_EQ(kl_lower_inverse(0.5, kInfinity), 0.0);
  // kl(0 || 1) is infinite, so any finite budget leaves room short of 1.
  EXPECT_LT(kl_upper_inverse(0.0, 5.0), 1.0);
  EXPECT_THROW(kl_upper_inverse(0.5, -0.1), DomainError);
  EXPECT_THROW(kl_upper_inverse(1.2, 0.1), DomainError);
}

TEST(KlInverse, BracketsTheBoundary) {
  const double step = 2.0 * kInverseTolerance;
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    for (double c : {1e-6, 1e-3, 0.05, 0.3, 1.0, 4.0}) {
      const double up = kl_upper_inverse(p, c);
      const double lo = kl_lower_inverse(p, c);
      EXPECT_GE(up, p);
      EXPECT_LE(lo, p);
      EXPECT_LE(bernoulli_kl(p, up), c);
      EXPECT_LE(bernoulli_kl(p, lo), c);
      if (up + step < 1.0) {
        EXPECT_GT(bernoulli_kl(p, up + step), c);
      }
      if (lo - step > 0.0) {
        EXPECT_GT(bernoulli_kl(p, lo - step), c);
      }
    }
  }
}

TEST(KlInverse, MonotoneInBudget) {
  double prev_up = 0.2, prev_lo = 0.2;
  for (double c = 0.001; c < 3.0; c *= 1.5) {
    const double up = kl_upper_inverse(0.2, c), lo = kl_lower_inverse(0.2, c);
    EXPECT_GE(up, prev_up);
    EXPECT_LE(lo, prev_lo);
    prev_up = up;
    prev_lo = lo;
  }
}

TEST(PinskerGap, Value) {
  EXPECT_DOUBLE_EQ(pinsker_gap(0.5), 0.5);
  EXPECT_EQ(pinsker_gap(0.0), 0.0);
  EXPECT_THROW(pinsker_gap(-1.0), DomainError);
  // The kl inverse is never looser than the Pinsker gap.
  for (double c : {0.01, 0.1, 0.5}) {
    EXPECT_LE(kl_upper_inverse(0.5, c) - 0.5, pinsker_gap(c) + 1e-12);
  }
}

}  // namespace
}  // namespace pacbandit
