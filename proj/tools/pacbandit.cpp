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

// Command-line runner: simulate, verify-bounds, oracles, compare-concentration.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pacbandit/harness.hpp"

namespace {

using pacbandit::ExperimentConfig;
using pacbandit::Mode;

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitInvalid = 2;

void add_common(CLI::App* sub, ExperimentConfig& cfg, std::string& means) {
  sub->add_option("-k,--arms", cfg.arms, "number of arms K")->capture_default_str();
  sub->add_option("-T,--horizon", cfg.horizon, "rounds per trajectory")->capture_default_str();
  sub->add_option("-M,--trajectories", cfg.trajectories, "number of trajectories")
      ->capture_default_str();
  sub->add_option("-d,--delta", cfg.delta, "confidence parameter")->capture_default_str();
  sub->add_option("-s,--seed", cfg.seed, "master seed")->capture_default_str();
  sub->add_option("--means", means, "comma-separated arm means (default: 0.9 down to 0.1)");
  sub->add_option("--warmup", cfg.warmup_length, "warmup rounds (0: K^3)")->capture_default_str();
  sub->add_option("-j,--workers", cfg.workers, "worker threads (0: all cores)")
      ->capture_default_str();
  sub->add_option("-o,--output-dir", cfg.output_dir, "directory for CSV files and manifest");
}

std::vector<double> parse_means(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& field : pacbandit::csv::split(text)) {
    out.push_back(pacbandit::csv::parse_double(field));
  }
  return out;
}

int simulate(const ExperimentConfig& cfg) {
  const auto r = pacbandit::run_simulate(cfg);
  if (!cfg.output_dir.empty()) pacbandit::write_outputs(cfg.output_dir, r);
  const auto& d = r.decomposition;
  std::printf("trajectories under envelope for all t >= W: %zu/%zu\n", r.within_envelope,
              cfg.trajectories);
  std::printf("median regret log-log slope: %.4f\n", r.median_regret_slope);
  std::printf("decomposition: %zu rounds, max identity error %.3g, term2 violations %zu, "
              "term4 violations %zu, sandwich violations %zu\n",
              d.rounds, d.max_identity_error, d.gibbs_violations, d.smoothing_violations,
              d.sandwich_violations);
  if (!r.rows.empty()) {
    const auto& last = r.rows.back();
    std::printf("t=%zu regret q05 %.4g median %.4g q95 %.4g envelope %.4g\n", last.t, last.q05,
                last.median, last.q95, last.envelope);
  }
  return d.clean() ? kExitOk : kExitContract;
}

int verify(const ExperimentConfig& cfg) {
  const auto r = pacbandit::run_verify_bounds(cfg);
  if (!cfg.output_dir.empty()) pacbandit::write_outputs(cfg.output_dir, r);
  for (const auto& c : r.coverage) {
    std::printf("%-20s violated %zu/%zu rate %.4f (delta %.4g) worst slack %.6g\n",
                c.bound.c_str(), c.violated, c.trajectories, c.rate(), c.nominal_delta,
                c.worst_slack);
  }
  std::printf("max per-round regret after warmup: %.6g\n", r.max_regret);
  return r.all_within_delta() ? kExitOk : kExitContract;
}

int oracles(const ExperimentConfig& cfg) {
  const auto r = pacbandit::run_oracles(cfg);
  if (!cfg.output_dir.empty()) pacbandit::write_outputs(cfg.output_dir, cfg, r);
  pacbandit::print_report(std::cout, r);
  return r.passed() ? kExitOk : kExitContract;
}

int compare(const ExperimentConfig& cfg) {
  const auto rows = pacbandit::run_compare_concentration(cfg);
  if (!cfg.output_dir.empty()) pacbandit::write_outputs(cfg.output_dir, cfg, rows);
  std::printf("%6s %6s %-20s %10s %10s %7s %7s %9s %9s\n", "N", "delta", "profile", "alt",
              "hoeffding", "ratio", "spike", "alt_rate", "hoef_rate");
  for (const auto& r : rows) {
    std::printf("%6zu %6.3g %-20s %10.4g %10.4g %7.4f %7.4f %9.4f %9.4f\n", r.n, r.delta,
                std::string(pacbandit::profile_name(r.profile)).c_str(), r.azuma_alt,
                r.hoeffding, r.ratio, r.spike_share, r.coverage.alt_rate(),
                r.coverage.hoeffding_rate());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pacbandit experiment runner"};
  app.set_version_flag("--version", std::string(pacbandit::kVersion));
  app.set_config("--config", "", "TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);

  ExperimentConfig sim_cfg, ver_cfg, orc_cfg, cmp_cfg;
  ver_cfg.mode = Mode::kVerifyBounds;
  ver_cfg.horizon = 2000;
  ver_cfg.trajectories = 1000;
  orc_cfg.mode = Mode::kOracles;
  cmp_cfg.mode = Mode::kCompareConcentration;
  cmp_cfg.trajectories = 10000;
  std::string sim_means, ver_means, orc_means, cmp_means;

  auto* sim = app.add_subcommand("simulate", "play the smoothed Gibbs strategy, report regret");
  add_common(sim, sim_cfg, sim_means);
  sim->add_option("--report-every", sim_cfg.report_every, "regret grid stride (0: auto)");
  sim->add_flag("--dump-traces", sim_cfg.dump_traces, "write every trajectory's trace");

  auto* ver = app.add_subcommand("verify-bounds", "simultaneous-in-t certificate coverage");
  add_common(ver, ver_cfg, ver_means);

  auto* orc = app.add_subcommand("oracles", "exact enumeration and identity checks");
  add_common(orc, orc_cfg, orc_means);
  orc->add_option("--chains", orc_cfg.chains, "random dependent chains")->capture_default_str();
  orc->add_option("--probes", orc_cfg.probes, "expsum probes")->capture_default_str();

  auto* cmp = app.add_subcommand("compare-concentration", "martingale bound comparison table");
  add_common(cmp, cmp_cfg, cmp_means);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*sim) {
      sim_cfg.means = parse_means(sim_means);
      return simulate(sim_cfg);
    }
    if (*ver) {
      ver_cfg.means = parse_means(ver_means);
      return verify(ver_cfg);
    }
    if (*orc) {
      orc_cfg.means = parse_means(orc_means);
      return oracles(orc_cfg);
    }
    cmp_cfg.means = parse_means(cmp_means);
    return compare(cmp_cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
}
