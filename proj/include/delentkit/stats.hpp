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

#ifndef DELENTKIT_STATS_HPP
#define DELENTKIT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delentkit/error.hpp"
#include "delentkit/format.hpp"
#include "delentkit/metrics.hpp"

namespace delentkit {

enum class Metric { Shannon, Glcm, Delentropy };

inline std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::Shannon: return "shannon";
    case Metric::Glcm: return "glcm";
    case Metric::Delentropy: return "delentropy";
  }
  return "delentropy";
}

inline Metric metric_from_name(std::string_view s) {
  if (s == "shannon") return Metric::Shannon;
  if (s == "glcm") return Metric::Glcm;
  if (s == "delentropy") return Metric::Delentropy;
  throw Error(Errc::InvalidArgument, "unknown metric '" + std::string(s) + "'");
}

inline double metric_value(const ComplexityRecord& r, Metric m) noexcept {
  switch (m) {
    case Metric::Shannon: return r.shannon_bits;
    case Metric::Glcm: return r.glcm_bits;
    case Metric::Delentropy: return r.delentropy_bits;
  }
  return r.delentropy_bits;
}

struct HistogramSpec {
  double low = 0.0;
  double high = 18.0;
  double bin_width = 0.25;

  std::size_t bin_count() const {
    if (!(bin_width > 0.0) || !(high > low)) {
      throw Error(Errc::InvalidArgument, "histogram needs high > low and width > 0");
    }
    return static_cast<std::size_t>(std::ceil((high - low) / bin_width - 1e-9));
  }
  double bin_low(std::size_t i) const { return low + bin_width * i; }
  double bin_high(std::size_t i) const {
    return std::min(high, low + bin_width * (i + 1));
  }
};

/// Empirical distribution of one metric over a dataset.
struct DatasetDistribution {
  std::string dataset_id;
  Metric metric = Metric::Delentropy;
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  HistogramSpec spec;
  std::vector<std::size_t> histogram;
  std::size_t out_of_range = 0;  // values clamped into an edge bin
  std::vector<double> values;    // ascending

  friend bool operator==(const DatasetDistribution& a,
                         const DatasetDistribution& b) {
    return a.dataset_id == b.dataset_id && a.metric == b.metric &&
           a.count == b.count && a.mean == b.mean && a.std_dev == b.std_dev &&
           a.min == b.min && a.max == b.max && a.spec.low == b.spec.low &&
           a.spec.high == b.spec.high && a.spec.bin_width == b.spec.bin_width &&
           a.histogram == b.histogram && a.out_of_range == b.out_of_range &&
           a.values == b.values;
  }
};

/// Mean, population sigma and histogram of `metric` over `records`. Records
/// are ordered by content hash first, so the result does not depend on the
/// input order.
inline DatasetDistribution aggregate(std::span<const ComplexityRecord> records,
                                     Metric metric,
                                     std::string dataset_id = {},
                                     HistogramSpec spec = {}) {
  if (records.empty()) {
    throw Error(Errc::EmptyDataset, "no records to aggregate");
  }
  std::vector<std::pair<Digest, double>> keyed;
  keyed.reserve(records.size());
  for (const auto& r : records) keyed.emplace_back(r.content_hash, metric_value(r, metric));
  std::sort(keyed.begin(), keyed.end());

  DatasetDistribution d;
  d.dataset_id = std::move(dataset_id);
  d.metric = metric;
  d.count = keyed.size();
  d.spec = spec;
  d.histogram.assign(spec.bin_count(), 0);

  const double n = static_cast<double>(d.count);
  double sum = 0.0;
  for (const auto& [h, v] : keyed) sum += v;
  d.mean = sum / n;
  double sq = 0.0;
  for (const auto& [h, v] : keyed) sq += (v - d.mean) * (v - d.mean);
  d.std_dev = std::sqrt(sq / n);

  d.values.reserve(d.count);
  for (const auto& [h, v] : keyed) {
    d.values.push_back(v);
    double pos = std::floor((v - spec.low) / spec.bin_width);
    if (v < spec.low || v > spec.high) ++d.out_of_range;
    pos = std::clamp(pos, 0.0, static_cast<double>(d.histogram.size() - 1));
    ++d.histogram[static_cast<std::size_t>(pos)];
  }
  std::sort(d.values.begin(), d.values.end());
  d.min = d.values.front();
  d.max = d.values.back();
  // Floating-point summation can land the mean an ulp outside [min, max].
  d.mean = std::clamp(d.mean, d.min, d.max);
  return d;
}

/// Type-7 quantile (linear interpolation between order statistics) over an
/// ascending sample.
inline double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(Errc::EmptyDataset, "quantile of empty sample");
  const double h = (sorted.size() - 1) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

/// Local maxima of the 3-bin moving average (zero beyond the edges). A run of
/// equal bins counts as one peak when it rises above both sides.
inline std::size_t count_modes(std::span<const std::size_t> histogram) {
  const std::size_t n = histogram.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = static_cast<double>(histogram[i]);
    if (i > 0) acc += histogram[i - 1];
    if (i + 1 < n) acc += histogram[i + 1];
    s[i] = acc / 3.0;
  }
  std::size_t modes = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const double left = i == 0 ? 0.0 : s[i - 1];
    const double right = j + 1 == n ? 0.0 : s[j + 1];
    if (s[i] > left && s[i] > right) ++modes;
    i = j + 1;
  }
  return modes;
}

struct SpreadDescriptors {
  std::optional<double> coefficient_of_variation;  // absent when mean == 0
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  std::size_t modes = 0;
};

inline SpreadDescriptors spread_descriptors(const DatasetDistribution& d) {
  if (d.count == 0 || d.values.empty()) {
    throw Error(Errc::EmptyDataset, "distribution has no samples");
  }
  if (d.count < 2) {
    throw Error(Errc::DegenerateDistribution,
                "spread descriptors need at least 2 samples");
  }
  SpreadDescriptors s;
  if (d.mean != 0.0) s.coefficient_of_variation = d.std_dev / d.mean;
  s.q1 = quantile_linear(d.values, 0.25);
  s.q3 = quantile_linear(d.values, 0.75);
  s.iqr = s.q3 - s.q1;
  s.modes = count_modes(d.histogram);
  return s;
}

// ---------------------------------------------------------------------------
// Serialisation.

inline nlohmann::json to_json(const DatasetDistribution& d) {
  return nlohmann::json{
      {"schema", "v1"},
      {"datasetId", d.dataset_id},
      {"metric", metric_name(d.metric)},
      {"count", d.count},
      {"mean", d.mean},
      {"stdDev", d.std_dev},
      {"min", d.min},
      {"max", d.max},
      {"histogram",
       {{"low", d.spec.low},
        {"high", d.spec.high},
        {"binWidth", d.spec.bin_width},
        {"counts", d.histogram}}},
      {"outOfRange", d.out_of_range},
      {"values", d.values},
  };
}

inline nlohmann::json to_json(const SpreadDescriptors& s) {
  nlohmann::json j{{"q1", s.q1}, {"q3", s.q3}, {"iqr", s.iqr}, {"modes", s.modes}};
  j["coefficientOfVariation"] = s.coefficient_of_variation
                                    ? nlohmann::json(*s.coefficient_of_variation)
                                    : nlohmann::json(nullptr);
  return j;
}

inline DatasetDistribution distribution_from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema", "") != "v1") {
      throw Error(Errc::ParseError, "distribution schema must be \"v1\"");
    }
    DatasetDistribution d;
    d.dataset_id = j.at("datasetId").get<std::string>();
    d.metric = metric_from_name(j.at("metric").get<std::string>());
    d.count = j.at("count").get<std::size_t>();
    d.mean = j.at("mean").get<double>();
    d.std_dev = j.at("stdDev").get<double>();
    d.min = j.at("min").get<double>();
    d.max = j.at("max").get<double>();
    const auto& h = j.at("histogram");
    d.spec = {h.at("low").get<double>(), h.at("high").get<double>(),
              h.at("binWidth").get<double>()};
    d.histogram = h.at("counts").get<std::vector<std::size_t>>();
    d.out_of_range = j.value("outOfRange", std::size_t{0});
    d.values = j.value("values", std::vector<double>{});
    std::size_t mass = 0;
    for (auto c : d.histogram) mass += c;
    if (mass != d.count) {
      throw Error(Errc::ParseError, "histogram mass does not equal count");
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("distribution document: ") + e.what());
  }
}

/// Plot data: header `bin_low,bin_high,count`, one row per bin.
inline std::string histogram_csv(const DatasetDistribution& d) {
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < d.histogram.size(); ++i) {
    out << format_sig(d.spec.bin_low(i)) << ',' << format_sig(d.spec.bin_high(i))
        << ',' << d.histogram[i] << '\n';
  }
  return out.str();
}

}  // namespace delentkit

#endif  // DELENTKIT_STATS_HPP
