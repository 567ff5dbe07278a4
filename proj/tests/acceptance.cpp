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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pacbandit/harness.hpp"

namespace {

using namespace pacbandit;
namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 20260415;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_seconds,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_seconds;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s [%d] %s: %s; %.2fs of %.0fs%s\n", pass ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), secs, budget_seconds, in_time ? "" : " (over budget)");
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome moment_bound() {
  const auto g = moment_grid(20);
  return {g.violations == 0 && g.evaluated == 1980,
          std::to_string(g.violations) + " violations of E[e^{N kl}] <= N+1 over " +
              std::to_string(g.evaluated) + " (N, p) pairs, max ratio " + num(g.worst_ratio)};
}

Outcome convex_domination() {
  const auto s = convex_domination_sweep(200, 6, 3, kSeed);
  return {s.violations == 0 && s.skipped == 0 && s.evaluations == 600,
          std::to_string(s.violations) + " violations in " + std::to_string(s.evaluations) +
              " chain/function pairs (" + std::to_string(s.skipped) +
              " chains skipped), min gap " + num(s.min_gap)};
}

Outcome martingale_coverage_check() {
  const auto equal = martingale_coverage(RangeProfile::kEqual, 100, 10000, 0.05, kSeed, 1);
  const auto weighted =
      martingale_coverage(RangeProfile::kImportanceWeighted, 100, 10000, 0.05, kSeed, 1);
  const bool ok = equal.alt_rate() <= 0.05 && equal.hoeffding_rate() <= 0.05 &&
                  weighted.alt_rate() <= 0.05 && weighted.hoeffding_rate() <= 0.05;
  return {ok, "+-1 steps: alternative " + num(equal.alt_rate()) + ", Hoeffding-Azuma " +
                  num(equal.hoeffding_rate()) + "; importance-weighted steps: alternative " +
                  num(weighted.alt_rate()) + ", Hoeffding-Azuma " +
                  num(weighted.hoeffding_rate())};
}

Outcome pinsker_identity() {
  double worst = 0.0;
  std::size_t points = 0;
  for (std::size_t n : {1u, 2u, 5u, 10u, 100u, 1000u, 10000u, 1000000u}) {
    for (double delta : {1e-6, 0.001, 0.01, 0.05, 0.1, 0.5, 0.99}) {
      for (auto [a, b] : {std::pair{-1.0, 1.0}, {-0.3, 2.5}, {0.0, 1.0}, {-7.0, 0.0},
                          {-1e-3, 1e3}}) {
        const double direct = azuma_alt_bound(n, a, b, delta);
        const double via = (b - a) * static_cast<double>(n) *
                           std::sqrt(azuma_alt_kl_rhs(n, delta) / 2.0);
        worst = std::max(worst, std::abs(direct - via) / direct);
        ++points;
      }
    }
  }
  const double tol = 4.0 * std::numeric_limits<double>::epsilon();
  return {worst <= tol, std::to_string(points) + " grid points, max relative error " +
                            num(worst) + " (tolerance " + num(tol) + ")"};
}

Outcome certificate_coverage() {
  ExperimentConfig c;
  c.mode = Mode::kVerifyBounds;
  c.arms = 2;
  c.means = {0.9, 0.1};
  c.horizon = 2000;
  c.trajectories = 1000;
  c.delta = 0.05;
  c.seed = kSeed;
  const auto r = run_verify_bounds(c);
  std::string detail;
  for (const auto& cov : r.coverage) {
    if (!detail.empty()) detail += ", ";
    detail += cov.bound + " " + num(cov.rate());
  }
  return {r.all_within_delta(), "violation rates " + detail};
}

Outcome thm3_consistency() {
  double worst = 0.0;
  std::size_t points = 0, beaten = 0;
  Engine rng = make_stream(kSeed, 6);
  for (std::size_t t : {1u, 2u, 10u, 100u, 1000u, 10000u}) {
    for (double delta : {0.001, 0.01, 0.05, 0.1, 0.5}) {
      for (int shape = 0; shape < 4; ++shape) {
        std::vector<double> pi(t);
        for (std::size_t i = 0; i < t; ++i) {
          const double tau = static_cast<double>(i + 1);
          switch (shape) {
            case 0: pi[i] = 0.5; break;
            case 1: pi[i] = std::min(0.5, std::pow(2.0 * tau, -0.25)); break;
            case 2: pi[i] = 0.01 + 0.49 * uniform01(rng); break;
            default: pi[i] = i % 7 == 0 ? 0.001 : 0.3; break;
          }
        }
        const double s = sum_inverse_squares(pi);
        const double lam = lambda_opt(t, delta, pi);
        for (double kl : {0.0, 0.01, std::log(2.0), 5.0}) {
          const double gap = thm3_gap_uniform(kl, t, delta, lam, s);
          worst = std::max(worst, std::abs(gap - thm3_closed_form(kl, t, delta, s)) / gap);
          if (kl == 0.0 && !(gap <= thm3_gap_uniform(kl, t, delta, 0.5 * lam, s) &&
                             gap <= thm3_gap_uniform(kl, t, delta, 2.0 * lam, s))) {
            ++beaten;
          }
          ++points;
        }
      }
    }
  }
  return {worst <= 1e-9 && beaten == 0,
          std::to_string(points) + " points, max relative error " + num(worst) +
              "; lambda_opt beaten by a x0.5/x2 perturbation " + std::to_string(beaten) +
              " times"};
}

struct EnvelopeRun {
  SimulateResult result;
  double envelope_slope;
};

std::vector<EnvelopeRun> envelope_runs;

double envelope_slope(std::size_t k) {
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    const double t = std::round(std::pow(10.0, 3.0 + i / 200.0));
    x.push_back(t);
    y.push_back(regret_bound_thm4(k, static_cast<std::size_t>(t), 0.05));
  }
  return fit_loglog_slope(x, y);
}

Outcome regret_envelope() {
  const std::vector<std::vector<double>> means{{0.9, 0.1}, {0.9, 0.5, 0.1}};
  bool ok = true;
  std::string detail;
  for (const auto& m : means) {
    ExperimentConfig c;
    c.arms = m.size();
    c.means = m;
    c.horizon = 10000;
    c.trajectories = 100;
    c.delta = 0.05;
    c.seed = kSeed;
    EnvelopeRun run{run_simulate(c), envelope_slope(c.arms)};
    const bool covered = run.result.within_envelope >= 95;
    const bool slope_ok = std::abs(run.envelope_slope + 0.25) <= 0.02;
    ok = ok && covered && slope_ok;
    detail += (detail.empty() ? "" : "; ") + std::string("K=") + std::to_string(c.arms) +
              ": " + std::to_string(run.result.within_envelope) +
              "/100 under envelope, envelope slope on [1e3,1e4] " + num(run.envelope_slope) +
              (slope_ok ? "" : " (outside -0.25 +- 0.02)") + ", median regret slope " +
              num(run.result.median_regret_slope);
    envelope_runs.push_back(std::move(run));
  }
  return {ok, detail};
}

Outcome decomposition() {
  if (envelope_runs.empty()) return {false, "no simulation output"};
  DecompositionStats all;
  for (const auto& r : envelope_runs) all.merge(r.result.decomposition);
  return {all.clean(1e-12) && all.rounds > 0,
          std::to_string(all.rounds) + " rounds, max |sum - regret| " +
              num(all.max_identity_error) + ", term2 > K/gamma " +
              std::to_string(all.gibbs_violations) + ", term4 > K eps " +
              std::to_string(all.smoothing_violations) + ", max term2 / (K/gamma) " +
              num(all.max_term2_over_bound)};
}

Outcome expsum() {
  const auto e = expsum_probes(100000, kSeed);
  return {e.violations == 0 && e.probes == 100000,
          std::to_string(e.violations) + " violations of ratio <= n/alpha in " +
              std::to_string(e.probes) + " probes; ln(n)/alpha exceeded " +
              std::to_string(e.conjecture_violations) + " times (informational)"};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "pacbandit_acceptance";
  fs::remove_all(root);
  const std::size_t many = std::max<std::size_t>(4, std::thread::hardware_concurrency());

  ExperimentConfig c;
  c.arms = 2;
  c.means = {0.9, 0.1};
  c.horizon = 5000;
  c.trajectories = 1;
  c.seed = kSeed;
  c.dump_traces = true;
  write_outputs(root / "a", run_simulate(c));
  write_outputs(root / "b", run_simulate(c));
  bool bytes_equal = true;
  for (const char* f : {"regret.csv", "envelope_first_trajectory.csv", "manifest.json",
                        "traces/trace_00000.csv"}) {
    bytes_equal = bytes_equal && slurp(root / "a" / f) == slurp(root / "b" / f) &&
                  !slurp(root / "a" / f).empty();
  }

  c.trajectories = 32;
  c.dump_traces = false;
  c.horizon = 2000;
  c.workers = 1;
  write_outputs(root / "seq", run_simulate(c));
  c.workers = many;
  write_outputs(root / "par", run_simulate(c));
  c.mode = Mode::kVerifyBounds;
  c.trajectories = 64;
  c.workers = 1;
  write_outputs(root / "vseq", run_verify_bounds(c));
  c.workers = many;
  write_outputs(root / "vpar", run_verify_bounds(c));
  bool parallel_equal = slurp(root / "seq" / "regret.csv") == slurp(root / "par" / "regret.csv");
  for (const char* f : {"coverage.csv", "coverage_rounds.csv", "certificates.csv"}) {
    parallel_equal = parallel_equal && slurp(root / "vseq" / f) == slurp(root / "vpar" / f);
  }
  fs::remove_all(root);
  return {bytes_equal && parallel_equal,
          std::string("repeat run ") + (bytes_equal ? "byte-identical" : "DIFFERS") +
              "; 1 vs " + std::to_string(many) + " workers " +
              (parallel_equal ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
  criterion(1, "kl moment bound", 10, moment_bound);
  criterion(2, "dependent chain convex domination", 60, convex_domination);
  criterion(3, "martingale bound coverage", 30, martingale_coverage_check);
  criterion(4, "alternative martingale bound identity", 10, pinsker_identity);
  criterion(5, "certificate coverage", 300, certificate_coverage);
  criterion(6, "weighted-martingale bound closed form", 10, thm3_consistency);
  criterion(7, "regret envelope", 300, regret_envelope);
  criterion(8, "regret decomposition", 10, decomposition);
  criterion(9, "exponential sum ratio", 30, expsum);
  criterion(10, "determinism and parallel equivalence", 120, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
