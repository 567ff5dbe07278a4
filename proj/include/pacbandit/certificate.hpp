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

#ifndef PACBANDIT_CERTIFICATE_HPP_
#define PACBANDIT_CERTIFICATE_HPP_

#include <cmath>

namespace pacbandit {

// Outcome of checking `lhs <= rhs` for one bound instance. slack = rhs - lhs.
struct Certificate {
  bool holds;
  double slack;
  double lhs;
  double rhs;
};

inline Certificate make_certificate(double lhs, double rhs) {
  // inf <= inf is treated as holding: an infinite bound is never violated.
  if (std::isinf(rhs) && rhs > 0.0) return Certificate{true, rhs, lhs, rhs};
  return Certificate{lhs <= rhs, rhs - lhs, lhs, rhs};
}

}  // namespace pacbandit

#endif  // PACBANDIT_CERTIFICATE_HPP_
