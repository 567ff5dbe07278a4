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
#include <sstream>
#include <vector>

#include "pacbandit/bandit_core.hpp"
#include "pacbandit/error.hpp"
#include "pacbandit/trace_io.hpp"

namespace pacbandit {
namespace {

TEST(Schedules, ReferenceValues) {
  const auto s = schedules(16, 2);
  EXPECT_NEAR(s.gamma, 2.378414230005442, 1e-14);
  EXPECT_NEAR(s.epsilon, 0.42044820762685727, 1e-15);
  EXPECT_NEAR(s.gamma * s.epsilon, 1.0, 1e-15);
  EXPECT_THROW(schedules(0, 2), DomainError);
  EXPECT_THROW(schedules(5, 1), DomainError);
}

TEST(Schedules, SmoothingFeasibleFromWarmupOn) {
  for (std::size_t k : {2u, 3u, 5u}) {
    const std::size_t w = default_warmup_length(k);
    EXPECT_NEAR(k * schedules(w, k).epsilon, 1.0, 1e-12);
    EXPECT_LT(k * schedules(w + 1, k).epsilon, 1.0);
    EXPECT_GT(k * schedules(w - 1, k).epsilon, 1.0);
  }
}

TEST(Gibbs, ShiftInvariantAndMonotone) {
  const std::vector<double> r{0.1, 0.5, 0.3};
  const std::vector<double> shifted{100.1, 100.5, 100.3};
  const auto a = gibbs_posterior(r, 3.0), b = gibbs_posterior(shifted, 3.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  EXPECT_GT(a[1], a[2]);
  EXPECT_GT(a[2], a[0]);
  EXPECT_TRUE(gibbs_posterior(r, 0.0) == SimplexVector::uniform(3));
  // Huge gamma * r stays finite.
  const auto sharp = gibbs_posterior(std::vector<double>{0.0, 800.0}, 10.0);
  EXPECT_DOUBLE_EQ(sharp[1], 1.0);
  EXPECT_THROW(gibbs_posterior(r, -1.0), DomainError);
}

TEST(Smoothing, FloorAndFeasibility) {
  const auto rho = SimplexVector::point_mass(4, 2);
  const auto pi = smooth_policy(rho, 0.1);
  EXPECT_NEAR(pi.min(), 0.1, 1e-15);
  EXPECT_NEAR(pi[2], 0.6 + 0.1, 1e-15);
  EXPECT_TRUE(smooth_policy(rho, 0.25) == SimplexVector::uniform(4));
  EXPECT_THROW(smooth_policy(rho, 0.26), ScheduleError);
}

TEST(PolicyFloor, Schedule) {
  EXPECT_DOUBLE_EQ(policy_floor(1, 2, 8), 0.5);
  EXPECT_DOUBLE_EQ(policy_floor(7, 2, 8), 0.5);
  EXPECT_DOUBLE_EQ(policy_floor(8, 2, 8), schedules(8, 2).epsilon);
  EXPECT_DOUBLE_EQ(policy_floor(20, 2, 8), schedules(20, 2).epsilon);
}

TEST(PolicyState, EstimatesAndRunningMinimum) {
  PolicyState s(2, 8);
  EXPECT_EQ(s.r_hat(0), 0.0);
  EXPECT_DOUBLE_EQ(s.pi_lmin(), 0.5);
  s.record(SimplexVector({0.25, 0.75}), 0, 1.0);
  EXPECT_DOUBLE_EQ(s.r_hat(0), 4.0);
  EXPECT_DOUBLE_EQ(s.pi_lmin(), 0.25);
  const auto next = update_estimates(s, SimplexVector({0.5, 0.5}), 1, 0.5);
  EXPECT_EQ(s.round(), 1u);
  EXPECT_EQ(next.round(), 2u);
  EXPECT_DOUBLE_EQ(next.r_hat(0), 2.0);
  EXPECT_DOUBLE_EQ(next.r_hat(1), 0.5);
  EXPECT_THROW(s.record(SimplexVector({1.0, 0.0}), 1, 1.0), DomainError);
  EXPECT_THROW(s.record(SimplexVector::uniform(2), 0, 1.5), DomainError);
  EXPECT_THROW(s.record(SimplexVector::uniform(3), 0, 1.0), DimensionError);
}

TEST(PolicyState, ImportanceWeightsAreUnbiased) {
  // Exact expectation over the action and a Bernoulli reward.
  const SimplexVector pi({0.2, 0.5, 0.3});
  const std::vector<double> means{0.9, 0.4, 0.1};
  for (std::size_t arm = 0; arm < 3; ++arm) {
    double expectation = 0.0;
    for (std::size_t action = 0; action < 3; ++action) {
      for (double reward : {0.0, 1.0}) {
        const double pr = pi[action] * (reward == 1.0 ? means[action] : 1.0 - means[action]);
        PolicyState s(3, 27);
        s.record(pi, action, reward);
        expectation += pr * s.r_hat(arm);
      }
    }
    EXPECT_NEAR(expectation, means[arm], 1e-15);
  }
}

TEST(NextPolicy, WarmupBoundary) {
  PolicyState s(2, 8);
  for (int t = 0; t < 7; ++t) {
    EXPECT_TRUE(next_policy(s) == SimplexVector::uniform(2));
    s.record(SimplexVector::uniform(2), 0, 1.0);
  }
  // t = 7: pi_8 is still uniform since K eps_8 = 1.
  const auto at_boundary = next_policy(s);
  EXPECT_NEAR(at_boundary[0], 0.5, 1e-12);
  s.record(at_boundary, 0, 1.0);
  const auto after = next_policy(s);
  EXPECT_GT(after[0], 0.5);
  EXPECT_GE(after.min(), schedules(9, 2).epsilon);
}

TEST(Environment, Basics) {
  const auto env = Environment::bernoulli({0.3, 0.8, 0.8});
  EXPECT_EQ(env.arms(), 3u);
  EXPECT_EQ(env.best_arm(), 1u);
  EXPECT_DOUBLE_EQ(env.best_mean(), 0.8);
  EXPECT_THROW(Environment::bernoulli({0.3, 1.2}), DomainError);
  EXPECT_THROW(Environment::bernoulli({}), DimensionError);
}

TEST(RewardModel, SamplesInRangeAndMeans) {
  Engine rng = make_stream(9, 0);
  const auto beta = RewardModel::discretized_beta(0.3, 4.0);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double x = beta.sample(rng);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    sum += x;
  }
  double exact = 0.0;
  for (std::size_t j = 0; j < beta.support().size(); ++j) {
    exact += beta.support()[j] * beta.probabilities()[j];
  }
  EXPECT_NEAR(sum / 20000, exact, 0.01);
  EXPECT_EQ(RewardModel::point_mass(0.4).sample(rng), 0.4);
  EXPECT_THROW(RewardModel::discretized_beta(0.0, 4.0), DomainError);
}

TEST(Rng, StreamsAreIndependentOfOrder) {
  Engine a = make_stream(1, 5), b = make_stream(1, 5), c = make_stream(1, 6);
  EXPECT_EQ(a(), b());
  EXPECT_NE(make_stream(1, 5)(), c());
  EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
}

TEST(Rng, SampleIndexFollowsProbabilities) {
  Engine rng = make_stream(2, 0);
  const std::vector<double> p{0.1, 0.0, 0.9};
  int counts[3] = {};
  for (int i = 0; i < 10000; ++i) ++counts[sample_index(rng, p)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / 10000.0, 0.1, 0.02);
}

TEST(Game, DeterministicForSeed) {
  const auto env = Environment::bernoulli({0.9, 0.1});
  const auto a = run_game(env, 300, 17), b = run_game(env, 300, 17);
  std::ostringstream sa, sb;
  write_trace(sa, a);
  write_trace(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  std::ostringstream sc;
  write_trace(sc, run_game(env, 300, 18));
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Game, TraceInvariants) {
  const auto env = Environment::bernoulli({0.7, 0.2, 0.5});
  const auto trace = run_game(env, 500, 3, GameConfig{0, TraceMode::kFull});
  ASSERT_EQ(trace.rounds.size(), 500u);
  EXPECT_EQ(trace.warmup_length, 27u);
  std::vector<double> sums(3, 0.0);
  double running_min = 1.0 / 3.0;
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const auto& r = trace.rounds[i];
    EXPECT_EQ(r.t, i + 1);
    running_min = std::min(running_min, r.policy.min());
    EXPECT_DOUBLE_EQ(r.pi_lmin, running_min);
    for (std::size_t a = 0; a < 3; ++a) {
      sums[a] += r.weighted[a];
      EXPECT_NEAR(r.r_hat[a], sums[a] / static_cast<double>(r.t), 1e-12);
    }
    if (r.t >= 27) {
      EXPECT_GE(r.policy.min(), schedules(r.t, 3).epsilon - 1e-15);
    }
  }
  // Summary mode recomputes the same weighted samples.
  const auto summary = run_game(env, 500, 3);
  for (std::size_t i = 0; i < 500; i += 37) {
    EXPECT_EQ(summary.weighted_samples(i), trace.weighted_samples(i));
  }
}

TEST(Game, LearnsBestArm) {
  const auto env = Environment::bernoulli({0.1, 0.9});
  const auto trace = run_game(env, 5000, 1);
  EXPECT_GT(trace.rounds.back().policy[1], 0.8);
}

TEST(TraceIo, RoundTripIsExact) {
  const auto env = Environment::bernoulli({0.6, 0.3});
  for (auto mode : {TraceMode::kSummary, TraceMode::kFull}) {
    const auto trace = run_game(env, 200, 4, GameConfig{0, mode});
    std::ostringstream out;
    write_trace(out, trace);
    std::istringstream in(out.str());
    const auto back = read_trace(in);
    ASSERT_EQ(back.rounds.size(), trace.rounds.size());
    EXPECT_EQ(back.mode, mode);
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
      EXPECT_TRUE(back.rounds[i].policy == trace.rounds[i].policy);
      EXPECT_EQ(back.rounds[i].r_hat, trace.rounds[i].r_hat);
      EXPECT_EQ(back.rounds[i].pi_lmin, trace.rounds[i].pi_lmin);
      EXPECT_EQ(back.rounds[i].weighted, trace.rounds[i].weighted);
    }
    std::ostringstream again;
    write_trace(again, back);
    EXPECT_EQ(again.str(), out.str());
  }
}

TEST(TraceIo, RejectsMalformed) {
  std::istringstream no_preamble("t,action\n");
  EXPECT_THROW(read_trace(no_preamble), DomainError);
  std::istringstream bad_row("# arms=2 warmup=8 mode=summary\n"
                             "t,action,reward,pi_lmin,pi_0,pi_1,r_hat_0,r_hat_1\n"
                             "1,0,1\n");
  EXPECT_THROW(read_trace(bad_row), DomainError);
}

}  // namespace
}  // namespace pacbandit
