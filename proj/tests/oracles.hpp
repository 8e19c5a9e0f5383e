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

// Brute-force reference implementations. They share no code with the
// library beyond the GrayImage container and are deliberately naive.

#ifndef DELENTKIT_TESTS_ORACLES_HPP
#define DELENTKIT_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "delentkit/image.hpp"

namespace delentkit::oracle {

inline double entropy_of_counts(const std::map<std::pair<int, int>, long>& counts) {
  long total = 0;
  for (const auto& [k, c] : counts) total += c;
  double h = 0.0;
  for (const auto& [k, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h += -p * std::log(p) / std::log(2.0);
  }
  return h;
}

inline double shannon(const GrayImage& img) {
  std::map<std::pair<int, int>, long> counts;
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) ++counts[{img.at(x, y), 0}];
  }
  return entropy_of_counts(counts);
}

/// Enumerates every ordered pair of pixel positions and keeps those whose
/// displacement equals (dw, dh).
inline std::map<std::pair<int, int>, long> glcm_counts(const GrayImage& img, long dw, long dh,
                                                       bool symmetric) {
  std::map<std::pair<int, int>, long> counts;
  const long w = static_cast<long>(img.width());
  const long h = static_cast<long>(img.height());
  for (long y1 = 0; y1 < h; ++y1)
    for (long x1 = 0; x1 < w; ++x1)
      for (long y2 = 0; y2 < h; ++y2)
        for (long x2 = 0; x2 < w; ++x2) {
          if (x2 - x1 != dw || y2 - y1 != dh) continue;
          const int a = img.at(x1, y1), b = img.at(x2, y2);
          ++counts[{a, b}];
          if (symmetric) ++counts[{b, a}];
        }
  return counts;
}

/// Unit direction (cos, -sin) rounded per axis, then scaled by d; rows grow
/// downwards so positive angles point up the image.
inline std::pair<long, long> angle_offset(int degrees, long d) {
  const double rad = degrees * std::acos(-1.0) / 180.0;
  return {d * std::lround(std::cos(rad)), d * std::lround(-std::sin(rad))};
}

inline double glcm_entropy(const GrayImage& img, long dw, long dh, bool symmetric) {
  return entropy_of_counts(glcm_counts(img, dw, dh, symmetric));
}

inline long round_half_away(double v) {
  return v < 0 ? -static_cast<long>(std::floor(-v + 0.5)) : static_cast<long>(std::floor(v + 0.5));
}

/// Rounded (dx, dy) samples of the 2x2 forward-difference kernel.
inline std::vector<std::pair<long, long>> gradient_pairs(const GrayImage& img) {
  std::vector<std::pair<long, long>> out;
  for (std::size_t y = 0; y + 1 < img.height(); ++y) {
    for (std::size_t x = 0; x + 1 < img.width(); ++x) {
      const double i00 = img.at(x, y), i10 = img.at(x + 1, y);
      const double i01 = img.at(x, y + 1), i11 = img.at(x + 1, y + 1);
      const double dx = (i10 - i00 + i11 - i01) / 2.0;
      const double dy = (i01 - i00 + i11 - i10) / 2.0;
      out.emplace_back(round_half_away(dx), round_half_away(dy));
    }
  }
  return out;
}

inline double delentropy(const GrayImage& img) {
  std::map<std::pair<int, int>, long> counts;
  for (auto [dx, dy] : gradient_pairs(img)) ++counts[{static_cast<int>(dx), static_cast<int>(dy)}];
  return 0.5 * entropy_of_counts(counts);
}

/// Two-pass mean and population variance.
inline std::pair<double, double> mean_and_population_sd(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double m = s / v.size();
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  return {m, std::sqrt(q / v.size())};
}

/// Spearman rho from explicit average ranks via the Pearson formula.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) ++less;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) { mx += rx[i] / n; my += ry[i] / n; }
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

}  // namespace delentkit::oracle

#endif  // DELENTKIT_TESTS_ORACLES_HPP
