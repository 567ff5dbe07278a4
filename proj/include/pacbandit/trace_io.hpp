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

#ifndef PACBANDIT_TRACE_IO_HPP_
#define PACBANDIT_TRACE_IO_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pacbandit/bandit_core.hpp"
#include "pacbandit/csv.hpp"

namespace pacbandit {

/// Columnar trace dump, one row per round:
///
///   # arms=K warmup=W mode=summary|full
///   t,action,reward,pi_lmin,pi_0..pi_{K-1},r_hat_0..r_hat_{K-1}[,w_0..w_{K-1}]
///
/// Values are printed with 17 significant digits so a read-back trace is
/// bit-identical to the one written.
inline void write_trace(std::ostream& out, const GameTrace& trace) {
  const bool full = trace.mode == TraceMode::kFull;
  out << "# arms=" << trace.arms << " warmup=" << trace.warmup_length
      << " mode=" << (full ? "full" : "summary") << '\n';
  std::vector<std::string> header{"t", "action", "reward", "pi_lmin"};
  for (std::size_t a = 0; a < trace.arms; ++a) header.push_back("pi_" + std::to_string(a));
  for (std::size_t a = 0; a < trace.arms; ++a) header.push_back("r_hat_" + std::to_string(a));
  if (full) {
    for (std::size_t a = 0; a < trace.arms; ++a) header.push_back("w_" + std::to_string(a));
  }
  csv::row(out, header);
  std::vector<std::string> fields;
  for (const auto& r : trace.rounds) {
    fields.clear();
    fields.push_back(csv::format(r.t));
    fields.push_back(csv::format(r.action));
    fields.push_back(csv::format(r.reward));
    fields.push_back(csv::format(r.pi_lmin));
    for (double p : r.policy) fields.push_back(csv::format(p));
    for (double x : r.r_hat) fields.push_back(csv::format(x));
    if (full) {
      for (double x : r.weighted) fields.push_back(csv::format(x));
    }
    csv::row(out, fields);
  }
}

inline GameTrace read_trace(std::istream& in) {
  GameTrace trace;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# arms=", 0) != 0) {
    throw DomainError("trace is missing its '# arms=' preamble");
  }
  {
    unsigned long long arms = 0, warmup = 0;
    char mode[16] = {};
    if (std::sscanf(line.c_str(), "# arms=%llu warmup=%llu mode=%15s", &arms, &warmup,
                    mode) != 3) {
      throw DomainError("malformed trace preamble: " + line);
    }
    trace.arms = arms;
    trace.warmup_length = warmup;
    trace.mode = std::string(mode) == "full" ? TraceMode::kFull : TraceMode::kSummary;
  }
  if (!std::getline(in, line)) throw DomainError("trace is missing its header");
  const std::size_t k = trace.arms;
  const bool full = trace.mode == TraceMode::kFull;
  const std::size_t columns = 4 + 2 * k + (full ? k : 0);
  if (csv::split(line).size() != columns) throw DomainError("trace header width mismatch");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != columns) throw DomainError("trace row width mismatch");
    std::vector<double> pi(k), r_hat(k), weighted;
    for (std::size_t a = 0; a < k; ++a) {
      pi[a] = csv::parse_double(f[4 + a]);
      r_hat[a] = csv::parse_double(f[4 + k + a]);
    }
    if (full) {
      weighted.resize(k);
      for (std::size_t a = 0; a < k; ++a) weighted[a] = csv::parse_double(f[4 + 2 * k + a]);
    }
    trace.rounds.push_back(TraceRound{csv::parse_index(f[0]), SimplexVector(std::move(pi)),
                                      csv::parse_index(f[1]), csv::parse_double(f[2]),
                                      std::move(r_hat), csv::parse_double(f[3]),
                                      std::move(weighted)});
  }
  return trace;
}

}  // namespace pacbandit

#endif  // PACBANDIT_TRACE_IO_HPP_
