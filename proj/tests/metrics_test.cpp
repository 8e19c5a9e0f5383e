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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "delentkit/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace delentkit {
namespace {

using delentkit::testing::random_image;
using delentkit::testing::ramp_x;

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::InvalidArgument;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

constexpr GlcmAngle kAngles[] = {GlcmAngle::Deg0, GlcmAngle::Deg45, GlcmAngle::Deg90,
                                 GlcmAngle::Deg135};

// --- Shannon ---------------------------------------------------------------

TEST(ShannonEntropyTest, Examples) {
  EXPECT_EQ(shannon_entropy(GrayImage(5, 3, 7)), 0.0);
  EXPECT_EQ(shannon_entropy(GrayImage(2, 1, std::vector<std::uint8_t>{0, 255})), 1.0);
  GrayImage all(16, 16);
  std::iota(all.pixels().begin(), all.pixels().end(), 0);
  EXPECT_DOUBLE_EQ(shannon_entropy(all), 8.0);
}

TEST(ShannonEntropyTest, BoundedAndPermutationInvariant) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    GrayImage img = random_image(9, 7, gen);
    const double h = shannon_entropy(img);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, 8.0);
    ASSERT_NEAR(h, oracle::shannon(img), 1e-12);
    std::shuffle(img.pixels().begin(), img.pixels().end(), gen);
    ASSERT_EQ(shannon_entropy(img), h);
  }
}

// --- GLCM ------------------------------------------------------------------

TEST(GlcmTest, HandEnumeratedTwoByTwo) {
  const GrayImage img(2, 2, std::vector<std::uint8_t>{0, 0, 1, 1});
  const GlcmMatrix m = glcm(img, 1, GlcmAngle::Deg0, false);
  EXPECT_EQ(m.pair_count, 2u);
  EXPECT_EQ(m.at(0, 0), 0.5);
  EXPECT_EQ(m.at(1, 1), 0.5);
  EXPECT_EQ(m.at(0, 1), 0.0);
  EXPECT_EQ(m.at(1, 0), 0.0);
  EXPECT_EQ(sum(m.probs), 1.0);
  EXPECT_EQ(glcm_entropy(m), 1.0);
}

TEST(GlcmTest, ConstantImageHasSingleCell) {
  const GrayImage img(6, 5, 99);
  for (GlcmAngle a : kAngles) {
    for (int d : {1, 2, 4}) {
      const GlcmMatrix m = glcm(img, d, a, false);
      EXPECT_EQ(m.at(99, 99), 1.0);
      EXPECT_EQ(glcm_entropy(m), 0.0);
    }
  }
}

TEST(GlcmTest, DisplacementTable) {
  EXPECT_EQ((GlcmOffset{3, GlcmAngle::Deg0}.displacement()), (std::pair<long, long>{3, 0}));
  EXPECT_EQ((GlcmOffset{3, GlcmAngle::Deg45}.displacement()), (std::pair<long, long>{3, -3}));
  EXPECT_EQ((GlcmOffset{3, GlcmAngle::Deg90}.displacement()), (std::pair<long, long>{0, -3}));
  EXPECT_EQ((GlcmOffset{3, GlcmAngle::Deg135}.displacement()), (std::pair<long, long>{-3, -3}));
}

TEST(GlcmTest, MatchesBruteForcePairEnumeration) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const GrayImage img = random_image(4, 4, gen);
    for (GlcmAngle a : kAngles) {
      for (bool sym : {false, true}) {
        const auto [dw, dh] = oracle::angle_offset(static_cast<int>(a), 1);
        const auto counts = oracle::glcm_counts(img, dw, dh, sym);
        long total = 0;
        for (const auto& [k, c] : counts) total += c;
        const GlcmMatrix m = glcm(img, 1, a, sym);
        double mass = 0.0;
        for (const auto& [k, c] : counts) {
          ASSERT_EQ(m.at(k.first, k.second), static_cast<double>(c) / total);
          mass += m.at(k.first, k.second);
        }
        ASSERT_NEAR(sum(m.probs), 1.0, 1e-12);
        ASSERT_NEAR(mass, 1.0, 1e-12);  // nothing outside the oracle's support
        ASSERT_NEAR(glcm_entropy(m), oracle::glcm_entropy(img, dw, dh, sym), 1e-12);
      }
    }
  }
}

TEST(GlcmTest, SymmetricModeIsExactlySymmetric) {
  std::mt19937_64 gen(8);
  const GrayImage img = random_image(17, 13, gen);
  for (GlcmAngle a : kAngles) {
    const GlcmMatrix m = glcm(img, 2, a, true);
    for (std::size_t i = 0; i < 256; ++i)
      for (std::size_t j = 0; j < 256; ++j) ASSERT_EQ(m.at(i, j), m.at(j, i));
  }
}

TEST(GlcmTest, OffsetErrors) {
  const GrayImage img(3, 3);
  EXPECT_EQ(error_code([&] { glcm(img, 3, GlcmAngle::Deg0, false); }), Errc::OffsetTooLarge);
  EXPECT_EQ(error_code([&] { glcm(img, 3, GlcmAngle::Deg90, false); }), Errc::OffsetTooLarge);
  EXPECT_EQ(error_code([&] { glcm(GrayImage(1, 1), 1, GlcmAngle::Deg0, false); }),
            Errc::OffsetTooLarge);
  EXPECT_EQ(error_code([&] { glcm(img, 0, GlcmAngle::Deg0, false); }), Errc::InvalidArgument);
  EXPECT_NO_THROW(glcm(img, 2, GlcmAngle::Deg135, false));
  EXPECT_EQ(error_code([] { glcm_angle_from_degrees(30); }), Errc::InvalidArgument);
}

// --- Gradients and delentropy ----------------------------------------------

TEST(GradientFieldTest, Examples) {
  const GradientField flat = gradient_field(GrayImage(5, 4, 17));
  EXPECT_EQ(flat.grid_w, 4u);
  EXPECT_EQ(flat.grid_h, 3u);
  EXPECT_TRUE(std::all_of(flat.dx.begin(), flat.dx.end(), [](double v) { return v == 0.0; }));
  EXPECT_TRUE(std::all_of(flat.dy.begin(), flat.dy.end(), [](double v) { return v == 0.0; }));

  const GradientField ramp = gradient_field(ramp_x(256, 6));
  EXPECT_TRUE(std::all_of(ramp.dx.begin(), ramp.dx.end(), [](double v) { return v == 1.0; }));
  EXPECT_TRUE(std::all_of(ramp.dy.begin(), ramp.dy.end(), [](double v) { return v == 0.0; }));

  const GradientField step = gradient_field(GrayImage(2, 2, std::vector<std::uint8_t>{0, 255, 0, 255}));
  ASSERT_EQ(step.size(), 1u);
  EXPECT_EQ(step.dx[0], 255.0);
  EXPECT_EQ(step.dy[0], 0.0);
}

TEST(GradientFieldTest, HalfIntegerSamplesAndBounds) {
  // [[0,1],[0,0]]: dx = (1 - 0 + 0 - 0)/2, dy = (0 - 0 + 0 - 1)/2
  const GradientField g = gradient_field(GrayImage(2, 2, std::vector<std::uint8_t>{0, 1, 0, 0}));
  EXPECT_EQ(g.dx[0], 0.5);
  EXPECT_EQ(g.dy[0], -0.5);

  std::mt19937_64 gen(4);
  const GradientField r = gradient_field(random_image(33, 21, gen));
  for (std::size_t k = 0; k < r.size(); ++k) {
    ASSERT_LE(std::abs(r.dx[k]), 255.0);
    ASSERT_LE(std::abs(r.dy[k]), 255.0);
  }
}

TEST(GradientFieldTest, TooSmall) {
  EXPECT_EQ(error_code([] { gradient_field(GrayImage(2, 1)); }), Errc::ImageTooSmall);
  EXPECT_EQ(error_code([] { gradient_field(GrayImage(1, 9)); }), Errc::ImageTooSmall);
  EXPECT_EQ(error_code([] { gradient_field(GrayImage(2, 2), GradientKernel::CentralDifference); }),
            Errc::ImageTooSmall);
}

TEST(GradientFieldTest, CentralDifferenceKernel) {
  const GradientField g = gradient_field(ramp_x(10, 5), GradientKernel::CentralDifference);
  EXPECT_EQ(g.grid_w, 8u);
  EXPECT_EQ(g.grid_h, 3u);
  EXPECT_TRUE(std::all_of(g.dx.begin(), g.dx.end(), [](double v) { return v == 1.0; }));
  EXPECT_TRUE(std::all_of(g.dy.begin(), g.dy.end(), [](double v) { return v == 0.0; }));
  EXPECT_EQ(delentropy(ramp_x(10, 5), GradientKernel::CentralDifference), 0.0);
}

TEST(DeledensityTest, SingleBinCases) {
  const Deledensity zero = deledensity(gradient_field(GrayImage(4, 4, 0)));
  EXPECT_EQ(zero.mass(0, 0), 1.0);
  EXPECT_EQ(std::count_if(zero.bins.begin(), zero.bins.end(), [](double p) { return p != 0.0; }), 1);

  const Deledensity ramp = deledensity(gradient_field(ramp_x(64, 8)));
  EXPECT_EQ(ramp.mass(1, 0), 1.0);
  EXPECT_EQ(ramp.at(256, 255), 1.0);
}

TEST(DeledensityTest, RoundsHalvesAwayFromZero) {
  GradientField g;
  g.dx = {0.5, -0.5, 1.5, -1.5};
  g.dy = {0.0, 0.0, -2.5, 2.5};
  g.grid_w = 4;
  g.grid_h = 1;
  const Deledensity p = deledensity(g);
  EXPECT_EQ(p.mass(1, 0), 0.25);
  EXPECT_EQ(p.mass(-1, 0), 0.25);
  EXPECT_EQ(p.mass(2, -3), 0.25);
  EXPECT_EQ(p.mass(-2, 3), 0.25);
  EXPECT_EQ(delentropy(p), 1.0);  // 4 equiprobable bins
}

TEST(DeledensityTest, MatchesBruteForceCounting) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage img = random_image(8, 8, gen);
    const auto pairs = oracle::gradient_pairs(img);
    const Deledensity p = deledensity(gradient_field(img));
    ASSERT_EQ(p.sample_count, 49u);
    double total = 0.0;
    for (double b : p.bins) total += b;
    ASSERT_NEAR(total, 1.0, 1e-12);
    for (auto [dx, dy] : pairs) {
      const auto same = std::count(pairs.begin(), pairs.end(), std::pair{dx, dy});
      ASSERT_EQ(p.mass(static_cast<int>(dx), static_cast<int>(dy)),
                static_cast<double>(same) / static_cast<double>(pairs.size()));
    }
  }
}

TEST(DelentropyTest, AnalyticZeros) {
  EXPECT_EQ(delentropy(GrayImage(9, 9, 200)), 0.0);
  EXPECT_EQ(delentropy(ramp_x(100, 30)), 0.0);
}

TEST(DelentropyTest, OffsetInvariance) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img = random_image(31, 17, gen, 0, 205);
    const double base = delentropy(img);
    for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(v + 50);
    ASSERT_EQ(delentropy(img), base);
  }
}

TEST(DelentropyTest, RotationBy180) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img = random_image(23, 19, gen);
    const double base = delentropy(img);
    std::reverse(img.pixels().begin(), img.pixels().end());
    ASSERT_NEAR(delentropy(img), base, 1e-9);
  }
}

TEST(DelentropyTest, ZeroIffSingleBin) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const GrayImage img = random_image(3, 3, gen, 0, 1);
    const Deledensity p = deledensity(gradient_field(img));
    const auto occupied = std::count_if(p.bins.begin(), p.bins.end(), [](double b) { return b > 0; });
    const double de = delentropy(p);
    ASSERT_GE(de, 0.0);
    ASSERT_EQ(de == 0.0, occupied == 1);
  }
}

TEST(DelentropyTest, BruteForceSmallImages) {
  std::mt19937_64 gen(15);
  std::uniform_int_distribution<int> side(2, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const GrayImage img = random_image(side(gen), side(gen), gen, 0, 3);
    ASSERT_NEAR(delentropy(img), oracle::delentropy(img), 1e-12);
    ASSERT_NEAR(shannon_entropy(img), oracle::shannon(img), 1e-12);
    ASSERT_NEAR(glcm_entropy(glcm(img, 1, GlcmAngle::Deg0, false)),
                oracle::glcm_entropy(img, 1, 0, false), 1e-12);
  }
}

TEST(DelentropyTest, RecomputationIsBitIdentical) {
  std::mt19937_64 gen(16);
  const GrayImage img = random_image(64, 64, gen);
  const double a = delentropy(img);
  for (int i = 0; i < 5; ++i) ASSERT_EQ(delentropy(img), a);
  EXPECT_LE(a, 0.5 * std::log2(511.0 * 511.0));
}

// --- Record ----------------------------------------------------------------

TEST(ComplexityRecordTest, Examples) {
  const ComplexityRecord flat = complexity_record(GrayImage(512, 512, 77));
  EXPECT_EQ(flat.shannon_bits, 0.0);
  EXPECT_EQ(flat.glcm_bits, 0.0);
  EXPECT_EQ(flat.delentropy_bits, 0.0);
  EXPECT_EQ(flat.width, 512u);
  EXPECT_EQ(flat.tool_version, tool_version(MetricParams{}));

  EXPECT_EQ(error_code([] { complexity_record(GrayImage(2, 1)); }), Errc::ImageTooSmall);

  std::mt19937_64 gen(17);
  const GrayImage img = random_image(16, 16, gen);
  const ComplexityRecord r = complexity_record(img);
  EXPECT_NEAR(r.shannon_bits, oracle::shannon(img), 1e-12);
  EXPECT_NEAR(r.glcm_bits, oracle::glcm_entropy(img, 1, 0, false), 1e-12);
  EXPECT_NEAR(r.delentropy_bits, oracle::delentropy(img), 1e-12);
  EXPECT_EQ(r.content_hash, content_hash(img));
  EXPECT_GE(r.glcm_bits, 0.0);
  EXPECT_LE(r.glcm_bits, 16.0);
}

TEST(ComplexityRecordTest, FingerprintTracksParameters) {
  MetricParams a, b;
  b.glcm_symmetric = true;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  MetricParams c;
  c.kernel = GradientKernel::CentralDifference;
  EXPECT_NE(a.fingerprint(), c.fingerprint());
  EXPECT_EQ(a.fingerprint(), "glcm-d1-a0-asym.kernel-forward.bins-511");
}

}  // namespace
}  // namespace delentkit
