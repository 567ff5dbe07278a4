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

#ifndef PACBANDIT_CSV_HPP_
#define PACBANDIT_CSV_HPP_

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pacbandit/error.hpp"

namespace pacbandit::csv {

// Shortest form that still round-trips: 17 significant digits.
inline std::string format(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format(std::size_t x) { return std::to_string(x); }
inline std::string format(int x) { return std::to_string(x); }
inline std::string format(bool x) { return x ? "1" : "0"; }
inline std::string format(std::string_view x) { return std::string(x); }
inline std::string format(const char* x) { return std::string(x); }
inline std::string format(const std::string& x) { return x; }

// Writes one comma-separated line.
template <typename... Fields>
void row(std::ostream& out, const Fields&... fields) {
  bool first = true;
  ((out << (first ? "" : ",") << format(fields), first = false), ...);
  out << '\n';
}

inline void row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw DomainError("not a number: '" + s + "'");
  }
  return v;
}

inline std::size_t parse_index(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw DomainError("not an index: '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace pacbandit::csv

#endif  // PACBANDIT_CSV_HPP_
