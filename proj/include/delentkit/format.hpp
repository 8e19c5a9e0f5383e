// Copyright 2026 The delentkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DELENTKIT_FORMAT_HPP
#define DELENTKIT_FORMAT_HPP

#include <cstdio>
#include <cstdlib>
#include <string>

namespace delentkit {

/// Significant digits used for every number in reports and plot data.
inline constexpr int kReportDigits = 9;

inline std::string format_sig(double v, int digits = kReportDigits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

/// The double nearest to v printed with `digits` significant digits; what a
/// reader of the printed value recovers.
inline double round_sig(double v, int digits = kReportDigits) {
  return std::strtod(format_sig(v, digits).c_str(), nullptr);
}

}  // namespace delentkit

#endif  // DELENTKIT_FORMAT_HPP
