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

#ifndef DELENTKIT_METRICS_HPP
#define DELENTKIT_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delentkit/digest.hpp"
#include "delentkit/error.hpp"
#include "delentkit/image.hpp"

namespace delentkit {

inline constexpr std::string_view kLibraryVersion = "1.0.0";

/// -sum p*log2(p) over a probability table in index order; 0*log 0 := 0.
inline double entropy_bits(std::span<const double> probs) noexcept {
  double acc = 0.0;
  for (double p : probs) {
    if (p > 0.0) acc -= p * std::log2(p);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Shannon entropy of the gray-level histogram.

inline std::array<std::uint64_t, kGrayLevels> gray_histogram(
    const GrayImage& img) noexcept {
  std::array<std::uint64_t, kGrayLevels> counts{};
  for (std::uint8_t v : img.pixels()) ++counts[v];
  return counts;
}

inline double shannon_entropy(const GrayImage& img) {
  const auto counts = gray_histogram(img);
  const double n = static_cast<double>(img.size());
  std::array<double, kGrayLevels> probs{};
  for (int i = 0; i < kGrayLevels; ++i) probs[i] = counts[i] / n;
  return entropy_bits(probs);
}

// ---------------------------------------------------------------------------
// Gray-level co-occurrence.

enum class GlcmAngle { Deg0 = 0, Deg45 = 45, Deg90 = 90, Deg135 = 135 };

struct GlcmOffset {
  int distance = 1;
  GlcmAngle angle = GlcmAngle::Deg0;

  /// Pixel displacement (dw, dh); image rows grow downwards, so positive
  /// angles point to negative dh.
  std::pair<long, long> displacement() const noexcept {
    const long d = distance;
    switch (angle) {
      case GlcmAngle::Deg0: return {d, 0};
      case GlcmAngle::Deg45: return {d, -d};
      case GlcmAngle::Deg90: return {0, -d};
      case GlcmAngle::Deg135: return {-d, -d};
    }
    return {d, 0};
  }
};

inline GlcmAngle glcm_angle_from_degrees(int deg) {
  switch (deg) {
    case 0: return GlcmAngle::Deg0;
    case 45: return GlcmAngle::Deg45;
    case 90: return GlcmAngle::Deg90;
    case 135: return GlcmAngle::Deg135;
    default:
      throw Error(Errc::InvalidArgument,
                  "GLCM angle must be one of 0, 45, 90, 135 (got " +
                      std::to_string(deg) + ")");
  }
}

/// 256x256 pair probabilities, row index = reference pixel level.
struct GlcmMatrix {
  static constexpr std::size_t kLevels = kGrayLevels;

  std::vector<double> probs = std::vector<double>(kLevels * kLevels, 0.0);
  GlcmOffset offset;
  bool symmetric = false;
  std::uint64_t pair_count = 0;  // counted pairs, including reversed ones

  double at(std::size_t i, std::size_t j) const noexcept {
    return probs[i * kLevels + j];
  }
};

inline GlcmMatrix glcm(const GrayImage& img, int distance, GlcmAngle angle,
                       bool symmetric) {
  if (distance < 1) {
    throw Error(Errc::InvalidArgument, "GLCM distance must be >= 1");
  }
  GlcmMatrix m;
  m.offset = {distance, angle};
  m.symmetric = symmetric;
  const auto [dw, dh] = m.offset.displacement();
  const long w = static_cast<long>(img.width());
  const long h = static_cast<long>(img.height());

  // Reference pixels whose neighbour stays inside the raster.
  const long x0 = std::max(0L, -dw), x1 = std::min(w, w - dw);
  const long y0 = std::max(0L, -dh), y1 = std::min(h, h - dh);
  if (x0 >= x1 || y0 >= y1) {
    throw Error(Errc::OffsetTooLarge,
                "GLCM offset d=" + std::to_string(distance) + " theta=" +
                    std::to_string(static_cast<int>(angle)) +
                    " leaves no pixel pairs in a " + std::to_string(w) + "x" +
                    std::to_string(h) + " image");
  }

  // Counts accumulate in place; doubles hold integers exactly up to 2^53.
  std::vector<double>& counts = m.probs;
  for (long y = y0; y < y1; ++y) {
    for (long x = x0; x < x1; ++x) {
      const std::size_t a = img.at(x, y);
      const std::size_t b = img.at(x + dw, y + dh);
      counts[a * GlcmMatrix::kLevels + b] += 1.0;
      if (symmetric) counts[b * GlcmMatrix::kLevels + a] += 1.0;
    }
  }
  const std::uint64_t pairs =
      static_cast<std::uint64_t>((x1 - x0) * (y1 - y0)) * (symmetric ? 2 : 1);
  m.pair_count = pairs;
  const double total = static_cast<double>(pairs);
  for (double& c : counts) {
    if (c != 0.0) c /= total;
  }
  return m;
}

inline GlcmMatrix glcm(const GrayImage& img, GlcmOffset offset,
                       bool symmetric) {
  return glcm(img, offset.distance, offset.angle, symmetric);
}

inline double glcm_entropy(const GlcmMatrix& m) noexcept {
  return entropy_bits(m.probs);
}

// ---------------------------------------------------------------------------
// Delentropy.

enum class GradientKernel {
  /// 2x2 forward differences averaged over the two adjacent rows/columns;
  /// samples on the (W-1)x(H-1) grid between pixel centres.
  ForwardDifference2x2,
  /// (I(w+1) - I(w-1)) / 2 on the (W-2)x(H-2) interior.
  CentralDifference,
};

inline std::string_view kernel_name(GradientKernel k) noexcept {
  return k == GradientKernel::ForwardDifference2x2 ? "forward" : "central";
}

/// Gradient components in half-integer steps, each within [-255, 255].
struct GradientField {
  std::vector<double> dx;
  std::vector<double> dy;
  std::size_t grid_w = 0;
  std::size_t grid_h = 0;

  std::size_t size() const noexcept { return dx.size(); }
};

inline GradientField gradient_field(
    const GrayImage& img,
    GradientKernel kernel = GradientKernel::ForwardDifference2x2) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t min_side =
      kernel == GradientKernel::ForwardDifference2x2 ? 2 : 3;
  if (w < min_side || h < min_side) {
    throw Error(Errc::ImageTooSmall,
                "gradient field needs at least " + std::to_string(min_side) +
                    "x" + std::to_string(min_side) + " pixels (got " +
                    std::to_string(w) + "x" + std::to_string(h) + ")");
  }
  GradientField g;
  if (kernel == GradientKernel::ForwardDifference2x2) {
    g.grid_w = w - 1;
    g.grid_h = h - 1;
  } else {
    g.grid_w = w - 2;
    g.grid_h = h - 2;
  }
  g.dx.resize(g.grid_w * g.grid_h);
  g.dy.resize(g.grid_w * g.grid_h);

  std::size_t k = 0;
  for (std::size_t y = 0; y < g.grid_h; ++y) {
    for (std::size_t x = 0; x < g.grid_w; ++x, ++k) {
      int sx, sy;  // twice the gradient, exact in integers
      if (kernel == GradientKernel::ForwardDifference2x2) {
        const int a = img.at(x, y), b = img.at(x + 1, y);
        const int c = img.at(x, y + 1), d = img.at(x + 1, y + 1);
        sx = (b - a) + (d - c);
        sy = (c - a) + (d - b);
      } else {
        sx = img.at(x + 2, y + 1) - img.at(x, y + 1);
        sy = img.at(x + 1, y + 2) - img.at(x + 1, y);
      }
      g.dx[k] = 0.5 * sx;
      g.dy[k] = 0.5 * sy;
    }
  }
  return g;
}

/// Joint (dx, dy) histogram with unit-width integer bins over [-255, 255]
/// on both axes; bins(i, j) holds dx = i - 255, dy = j - 255.
struct Deledensity {
  static constexpr int kRange = 255;
  static constexpr std::size_t kBins = 2 * kRange + 1;

  std::vector<double> bins = std::vector<double>(kBins * kBins, 0.0);
  std::uint64_t sample_count = 0;

  double at(std::size_t i, std::size_t j) const noexcept {
    return bins[i * kBins + j];
  }
  /// Probability mass of the integer gradient pair (dx, dy).
  double mass(int dx, int dy) const noexcept {
    if (std::abs(dx) > kRange || std::abs(dy) > kRange) return 0.0;
    return at(static_cast<std::size_t>(dx + kRange),
              static_cast<std::size_t>(dy + kRange));
  }
};

/// Half-integer to bin index; std::lround rounds halves away from zero.
inline long gradient_bin(double v) noexcept { return std::lround(v); }

inline Deledensity deledensity(const GradientField& g) {
  if (g.dx.size() != g.dy.size() || g.dx.empty()) {
    throw Error(Errc::InvalidArgument, "gradient field is empty or ragged");
  }
  std::vector<std::uint32_t> counts(Deledensity::kBins * Deledensity::kBins,
                                    0);
  for (std::size_t k = 0; k < g.dx.size(); ++k) {
    const long i = gradient_bin(g.dx[k]) + Deledensity::kRange;
    const long j = gradient_bin(g.dy[k]) + Deledensity::kRange;
    ++counts[static_cast<std::size_t>(i) * Deledensity::kBins +
             static_cast<std::size_t>(j)];
  }
  Deledensity p;
  p.sample_count = g.dx.size();
  // Normalised by the actual sample count, so the table sums to one.
  const double total = static_cast<double>(p.sample_count);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] != 0) p.bins[k] = counts[k] / total;
  }
  return p;
}

/// DE = -1/2 sum p log2 p.
inline double delentropy(const Deledensity& p) noexcept {
  return 0.5 * entropy_bits(p.bins);
}

inline double delentropy(
    const GrayImage& img,
    GradientKernel kernel = GradientKernel::ForwardDifference2x2) {
  return delentropy(deledensity(gradient_field(img, kernel)));
}

// ---------------------------------------------------------------------------
// Per-image record.

struct MetricParams {
  GlcmOffset glcm_offset{};
  bool glcm_symmetric = false;
  GradientKernel kernel = GradientKernel::ForwardDifference2x2;

  /// Stable identifier of every knob that changes a metric value.
  std::string fingerprint() const {
    return "glcm-d" + std::to_string(glcm_offset.distance) + "-a" +
           std::to_string(static_cast<int>(glcm_offset.angle)) +
           (glcm_symmetric ? "-sym" : "-asym") + ".kernel-" +
           std::string(kernel_name(kernel)) + ".bins-" +
           std::to_string(Deledensity::kBins);
  }

  friend bool operator==(const MetricParams& a, const MetricParams& b) {
    return a.fingerprint() == b.fingerprint();
  }
};

/// Version tag stored in every record; cached records only match when the
/// library version and metric parameters are identical.
inline std::string tool_version(const MetricParams& params) {
  return "delentkit/" + std::string(kLibraryVersion) + "+" +
         params.fingerprint();
}

struct ComplexityRecord {
  Digest content_hash{};
  double shannon_bits = 0.0;
  double glcm_bits = 0.0;
  double delentropy_bits = 0.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string tool_version;

  friend bool operator==(const ComplexityRecord&,
                         const ComplexityRecord&) = default;
};

inline ComplexityRecord complexity_record(const GrayImage& img,
                                          const MetricParams& params = {}) {
  ComplexityRecord r;
  const GradientField g = gradient_field(img, params.kernel);
  r.delentropy_bits = delentropy(deledensity(g));
  r.shannon_bits = shannon_entropy(img);
  r.glcm_bits = glcm_entropy(glcm(img, params.glcm_offset, params.glcm_symmetric));
  r.content_hash = content_hash(img);
  r.width = img.width();
  r.height = img.height();
  r.tool_version = tool_version(params);
  return r;
}

}  // namespace delentkit

#endif  // DELENTKIT_METRICS_HPP
