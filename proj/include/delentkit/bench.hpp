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

#ifndef DELENTKIT_BENCH_HPP
#define DELENTKIT_BENCH_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delentkit/digest.hpp"
#include "delentkit/error.hpp"
#include "delentkit/fid.hpp"
#include "delentkit/format.hpp"
#include "delentkit/stats.hpp"

namespace delentkit {

// ---------------------------------------------------------------------------
// Seeded subset sampling.

/// Identifies the sampling procedure written into manifests. Bump when the
/// generator, the bounded-draw rule or the shuffle changes.
inline constexpr std::string_view kSamplerId = "mt19937_64/rejection-mod/fisher-yates-v1";
inline constexpr std::string_view kManifestSchema = "v1";

struct ListingEntry {
  std::string path;
  Digest content_hash{};

  friend bool operator==(const ListingEntry&, const ListingEntry&) = default;
};

struct SampleManifest {
  std::string dataset_id;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::vector<ListingEntry> members;

  friend bool operator==(const SampleManifest&, const SampleManifest&) = default;
};

/// Uniform draw from [0, bound) with modulo rejection; the standard pins the
/// mt19937_64 output sequence, so this is portable across implementations.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

/// Draws `size` distinct images. The listing is sorted by path and
/// de-duplicated by content hash (first path wins) before a partial
/// Fisher-Yates shuffle; the first `size` slots form the manifest.
inline SampleManifest sample_subset(std::vector<ListingEntry> listing,
                                    std::size_t size, std::uint64_t seed,
                                    std::string dataset_id = {}) {
  if (listing.empty()) throw Error(Errc::EmptyListing, "dataset listing is empty");
  std::sort(listing.begin(), listing.end(),
            [](const ListingEntry& a, const ListingEntry& b) { return a.path < b.path; });
  std::set<Digest> seen;
  std::erase_if(listing, [&](const ListingEntry& e) {
    return !seen.insert(e.content_hash).second;
  });
  if (size > listing.size()) {
    throw Error(Errc::SizeExceedsDataset,
                "requested " + std::to_string(size) + " images from a dataset of " +
                    std::to_string(listing.size()) + " distinct images");
  }
  std::mt19937_64 gen(seed);
  const std::size_t n = listing.size();
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(gen, n - i));
    std::swap(listing[i], listing[j]);
  }
  listing.resize(size);
  return SampleManifest{std::move(dataset_id), size, seed, std::move(listing)};
}

inline nlohmann::json to_json(const SampleManifest& m) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& e : m.members) {
    members.push_back({{"path", e.path}, {"contentHash", to_hex(e.content_hash)}});
  }
  return {{"schema", kManifestSchema}, {"sampler", kSamplerId},
          {"datasetId", m.dataset_id}, {"size", m.size},
          {"seed", m.seed},          {"members", members}};
}

inline SampleManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kManifestSchema) {
      throw Error(Errc::ParseError, "unsupported manifest schema");
    }
    SampleManifest m;
    m.dataset_id = j.at("datasetId").get<std::string>();
    m.size = j.at("size").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("members")) {
      m.members.push_back({e.at("path").get<std::string>(),
                           digest_from_hex(e.at("contentHash").get<std::string>())});
    }
    if (m.members.size() != m.size) {
      throw Error(Errc::ParseError, "manifest member count does not match size");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("manifest: ") + e.what());
  }
}

inline std::string manifest_text(const SampleManifest& m) {
  return to_json(m).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Fidelity curves.

struct CurvePoint {
  std::size_t training_size = 0;
  double fid = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct FidelityCurve {
  std::string dataset_id;
  std::string model_label;
  std::vector<CurvePoint> points;  // strictly increasing training_size

  friend bool operator==(const FidelityCurve&, const FidelityCurve&) = default;

  std::optional<double> fid_at(std::size_t size) const {
    for (const auto& p : points) {
      if (p.training_size == size) return p.fid;
    }
    return std::nullopt;
  }
};

/// Sorts points by size and checks the curve invariants.
inline FidelityCurve make_curve(std::string dataset_id, std::string model_label,
                                std::vector<CurvePoint> points) {
  std::sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.training_size < b.training_size;
  });
  const std::string name = dataset_id + "/" + model_label;
  if (points.size() < 2) {
    throw Error(Errc::DegenerateCurve, name + ": a curve needs at least 2 points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].fid) || points[i].fid < 0.0) {
      throw Error(Errc::InvalidArgument, name + ": FID must be finite and >= 0");
    }
    if (i > 0 && points[i].training_size == points[i - 1].training_size) {
      throw Error(Errc::InvalidArgument, name + ": duplicate training size " +
                                             std::to_string(points[i].training_size));
    }
  }
  return FidelityCurve{std::move(dataset_id), std::move(model_label), std::move(points)};
}

/// (FID at the smallest size - FID at the largest) / FID at the smallest.
inline double percent_reduction(const FidelityCurve& c) {
  if (c.points.size() < 2) {
    throw Error(Errc::DegenerateCurve, "percent reduction needs at least 2 points");
  }
  const double first = c.points.front().fid;
  const double last = c.points.back().fid;
  if (first == 0.0) {
    throw Error(Errc::DivisionByZero, "FID at the smallest training size is 0");
  }
  return (first - last) / first;
}

inline constexpr double kDefaultPlateauThreshold = 1e-3;  // FID per image

struct IntervalSlope {
  std::size_t from_size = 0;
  std::size_t to_size = 0;
  double slope = 0.0;  // FID per image
  bool plateau = false;

  friend bool operator==(const IntervalSlope&, const IntervalSlope&) = default;
};

inline std::vector<IntervalSlope> curve_slopes(
    const FidelityCurve& c, double plateau_threshold = kDefaultPlateauThreshold) {
  if (c.points.size() < 2) {
    throw Error(Errc::DegenerateCurve, "slopes need at least 2 points");
  }
  std::vector<IntervalSlope> out;
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto& a = c.points[i - 1];
    const auto& b = c.points[i];
    IntervalSlope s{a.training_size, b.training_size, 0.0, false};
    if (b.training_size != a.training_size) {
      s.slope = (b.fid - a.fid) /
                (static_cast<double>(b.training_size) - static_cast<double>(a.training_size));
    }
    s.plateau = std::abs(s.slope) < plateau_threshold;
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complexity vs fidelity.

enum class ComplexityStat { Mean, StdDev, Cv };

inline std::string_view stat_name(ComplexityStat s) noexcept {
  switch (s) {
    case ComplexityStat::Mean: return "mean";
    case ComplexityStat::StdDev: return "stddev";
    case ComplexityStat::Cv: return "cv";
  }
  return "stddev";
}

inline ComplexityStat stat_from_name(std::string_view s) {
  if (s == "mean") return ComplexityStat::Mean;
  if (s == "stddev") return ComplexityStat::StdDev;
  if (s == "cv") return ComplexityStat::Cv;
  throw Error(Errc::InvalidArgument, "unknown complexity statistic '" + std::string(s) + "'");
}

inline double complexity_stat(const DatasetDistribution& d, ComplexityStat s) {
  switch (s) {
    case ComplexityStat::Mean: return d.mean;
    case ComplexityStat::StdDev: return d.std_dev;
    case ComplexityStat::Cv:
      if (d.mean == 0.0) {
        throw Error(Errc::DegenerateDistribution,
                    d.dataset_id + ": coefficient of variation undefined for mean 0");
      }
      return d.std_dev / d.mean;
  }
  return d.std_dev;
}

/// 1-based ranks; tied values share the average of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Spearman's rho as the Pearson correlation of average ranks. Absent when
/// either variable has no rank variance.
inline std::optional<double> spearman_rho(const std::vector<double>& x,
                                          const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw Error(Errc::DimensionMismatch, "rank correlation needs equal-length inputs");
  }
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationPair {
  std::string dataset_id;
  double complexity_stat = 0.0;
  double fid_at_size = 0.0;

  friend bool operator==(const CorrelationPair&, const CorrelationPair&) = default;
};

inline constexpr std::size_t kMinDatasetsForRho = 3;

struct CorrelationReport {
  std::string model_label;
  ComplexityStat stat = ComplexityStat::StdDev;
  std::size_t size = 0;
  std::vector<CorrelationPair> pairs;  // ordered by dataset id
  std::optional<double> spearman_rho;

  friend bool operator==(const CorrelationReport&, const CorrelationReport&) = default;
};

/// Pairs each dataset's complexity statistic with its FID at `at_size`.
/// `curves` must hold at most one curve per dataset (one model).
inline CorrelationReport correlation_report(
    const std::vector<DatasetDistribution>& distributions,
    const std::vector<FidelityCurve>& curves, std::size_t at_size,
    ComplexityStat stat) {
  std::map<std::string, const DatasetDistribution*> by_id;
  for (const auto& d : distributions) by_id[d.dataset_id] = &d;
  std::map<std::string, const FidelityCurve*> curve_by_id;
  CorrelationReport r;
  r.stat = stat;
  r.size = at_size;
  for (const auto& c : curves) {
    if (!curve_by_id.emplace(c.dataset_id, &c).second) {
      throw Error(Errc::InvalidArgument,
                  "several curves for dataset '" + c.dataset_id + "'; correlate one model at a time");
    }
    if (r.model_label.empty()) r.model_label = c.model_label;
  }
  for (const auto& [id, d] : by_id) {
    if (!curve_by_id.contains(id)) {
      throw Error(Errc::MissingDataset, "no fidelity curve for dataset '" + id + "'");
    }
  }
  for (const auto& [id, c] : curve_by_id) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(Errc::MissingDataset, "no complexity distribution for dataset '" + id + "'");
    }
    const auto fid = c->fid_at(at_size);
    if (!fid) {
      throw Error(Errc::MissingSizePoint, "curve " + id + "/" + c->model_label +
                                              " has no point at size " + std::to_string(at_size));
    }
    r.pairs.push_back({id, complexity_stat(*it->second, stat), *fid});
  }
  if (r.pairs.size() >= kMinDatasetsForRho) {
    std::vector<double> xs, ys;
    for (const auto& p : r.pairs) {
      xs.push_back(p.complexity_stat);
      ys.push_back(p.fid_at_size);
    }
    r.spearman_rho = spearman_rho(xs, ys);
  }
  return r;
}

// ---------------------------------------------------------------------------
// FID tables.

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  for (auto f : split_csv(line)) out.emplace_back(trim(f));
  return out;
}

inline std::size_t parse_size(const std::string& s, std::size_t lineno) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad training size '" + s + "'");
  }
  return v;
}

}  // namespace detail

/// Groups (dataset, model, size, fid) rows into curves ordered by
/// (dataset, model).
inline std::vector<FidelityCurve> assemble_curves(
    const std::vector<std::tuple<std::string, std::string, std::size_t, double>>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<CurvePoint>> groups;
  for (const auto& [ds, model, size, fid] : rows) {
    groups[{ds, model}].push_back({size, fid});
  }
  std::vector<FidelityCurve> curves;
  for (auto& [key, pts] : groups) {
    curves.push_back(make_curve(key.first, key.second, std::move(pts)));
  }
  return curves;
}

/// Reads either a score table (dataset_id,model_label,training_size,fid) or
/// a feature table (dataset_id,model_label,training_size,real_features,
/// generated_features) whose feature paths are resolved against the table's
/// directory and scored in-process.
inline std::vector<FidelityCurve> load_fid_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::tuple<std::string, std::string, std::size_t, double>> rows;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::ParseError, path.string() + ":" + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line);
    if (header.empty()) {
      header = fields;
      const bool scores = header == std::vector<std::string>{"dataset_id", "model_label",
                                                             "training_size", "fid"};
      const bool features =
          header == std::vector<std::string>{"dataset_id", "model_label", "training_size",
                                             "real_features", "generated_features"};
      if (!scores && !features) fail("unrecognised FID table header");
      continue;
    }
    if (fields.size() != header.size()) fail("wrong number of columns");
    const std::size_t size = detail::parse_size(fields[2], lineno);
    double fid = 0.0;
    if (header.size() == 4) {
      if (!detail::parse_double(fields[3], fid) || !std::isfinite(fid)) fail("bad FID value");
    } else {
      const auto base = path.parent_path();
      auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
      };
      fid = fid_from_files(resolve(fields[3]), resolve(fields[4])).fid;
    }
    rows.emplace_back(fields[0], fields[1], size, fid);
  }
  if (header.empty()) fail("empty FID table");
  if (rows.empty()) throw Error(Errc::DegenerateCurve, path.string() + ": no FID rows");
  return assemble_curves(rows);
}

// ---------------------------------------------------------------------------
// Report bundle.

struct CurveSummary {
  FidelityCurve curve;
  std::optional<double> percent_reduction;  // absent when FID at smallest size is 0
  std::vector<IntervalSlope> slopes;

  friend bool operator==(const CurveSummary&, const CurveSummary&) = default;
};

struct ReportBundle {
  std::vector<CurveSummary> curves;
  std::map<std::string, double> mean_reduction_by_model;
  std::vector<DatasetDistribution> distributions;
  std::vector<CorrelationReport> correlations;
  double plateau_threshold = kDefaultPlateauThreshold;

  friend bool operator==(const ReportBundle&, const ReportBundle&) = default;
};

struct ReportOptions {
  std::optional<std::size_t> at_size;  // default: largest size shared by a model's curves
  ComplexityStat stat = ComplexityStat::StdDev;
  double plateau_threshold = kDefaultPlateauThreshold;
};

/// Reductions, slopes, per-model mean reduction (arithmetic mean over
/// datasets) and, when distributions are given, one correlation report per
/// model label.
inline ReportBundle build_report(const std::vector<FidelityCurve>& curves,
                                 const std::vector<DatasetDistribution>& distributions,
                                 const ReportOptions& opts = {}) {
  if (curves.empty()) throw Error(Errc::DegenerateCurve, "no fidelity curves");
  ReportBundle b;
  b.plateau_threshold = opts.plateau_threshold;
  b.distributions = distributions;
  std::sort(b.distributions.begin(), b.distributions.end(),
            [](const auto& x, const auto& y) { return x.dataset_id < y.dataset_id; });

  std::map<std::string, std::vector<FidelityCurve>> by_model;
  std::map<std::string, std::pair<double, std::size_t>> reduction_acc;
  for (const auto& c : curves) {
    CurveSummary s{c, std::nullopt, curve_slopes(c, opts.plateau_threshold)};
    if (c.points.front().fid != 0.0) {
      s.percent_reduction = percent_reduction(c);
      auto& acc = reduction_acc[c.model_label];
      acc.first += *s.percent_reduction;
      ++acc.second;
    }
    b.curves.push_back(std::move(s));
    by_model[c.model_label].push_back(c);
  }
  std::sort(b.curves.begin(), b.curves.end(), [](const auto& x, const auto& y) {
    return std::tie(x.curve.dataset_id, x.curve.model_label) <
           std::tie(y.curve.dataset_id, y.curve.model_label);
  });
  for (const auto& [model, acc] : reduction_acc) {
    b.mean_reduction_by_model[model] = acc.first / static_cast<double>(acc.second);
  }

  if (!distributions.empty()) {
    for (const auto& [model, mc] : by_model) {
      std::size_t at = 0;
      if (opts.at_size) {
        at = *opts.at_size;
      } else {
        std::set<std::size_t> common;
        for (const auto& p : mc.front().points) common.insert(p.training_size);
        for (const auto& c : mc) {
          std::set<std::size_t> mine;
          for (const auto& p : c.points) {
            if (common.contains(p.training_size)) mine.insert(p.training_size);
          }
          common = std::move(mine);
        }
        if (common.empty()) {
          throw Error(Errc::MissingSizePoint,
                      "curves of model '" + model + "' share no training size");
        }
        at = *common.rbegin();
      }
      auto report = correlation_report(distributions, mc, at, opts.stat);
      report.model_label = model;
      b.correlations.push_back(std::move(report));
    }
  }
  return b;
}

namespace detail {

inline nlohmann::json rounded(double v) { return round_sig(v); }

inline nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? rounded(*v) : nlohmann::json(nullptr);
}

inline std::optional<double> read_optional(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline std::string file_stem_safe(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("_") : out;
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot create " + p.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed: " + p.string());
}

}  // namespace detail

/// Report JSON with every floating-point value at 9 significant digits.
inline nlohmann::json to_json(const ReportBundle& b) {
  using detail::rounded;
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& s : b.curves) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.curve.points) {
      pts.push_back({{"trainingSize", p.training_size}, {"fid", rounded(p.fid)}});
    }
    nlohmann::json slopes = nlohmann::json::array();
    for (const auto& sl : s.slopes) {
      slopes.push_back({{"fromSize", sl.from_size}, {"toSize", sl.to_size},
                        {"slope", rounded(sl.slope)}, {"plateau", sl.plateau}});
    }
    curves.push_back({{"datasetId", s.curve.dataset_id},
                      {"modelLabel", s.curve.model_label},
                      {"points", pts},
                      {"percentReduction", detail::optional_number(s.percent_reduction)},
                      {"slopes", slopes}});
  }
  nlohmann::json reductions = nlohmann::json::object();
  for (const auto& [model, r] : b.mean_reduction_by_model) reductions[model] = rounded(r);

  nlohmann::json dists = nlohmann::json::array();
  for (const auto& d : b.distributions) {
    nlohmann::json j = to_json(d);
    for (const char* k : {"mean", "stdDev", "min", "max"}) j[k] = rounded(j[k].get<double>());
    auto& h = j["histogram"];
    for (const char* k : {"low", "high", "binWidth"}) h[k] = rounded(h[k].get<double>());
    for (auto& v : j["values"]) v = rounded(v.get<double>());
    if (d.count >= 2) {
      nlohmann::json sp = to_json(spread_descriptors(d));
      for (const char* k : {"q1", "q3", "iqr"}) sp[k] = rounded(sp[k].get<double>());
      if (!sp["coefficientOfVariation"].is_null()) {
        sp["coefficientOfVariation"] = rounded(sp["coefficientOfVariation"].get<double>());
      }
      j["spread"] = sp;
    }
    dists.push_back(std::move(j));
  }

  nlohmann::json corrs = nlohmann::json::array();
  for (const auto& c : b.correlations) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : c.pairs) {
      pairs.push_back({{"datasetId", p.dataset_id},
                       {"complexityStat", rounded(p.complexity_stat)},
                       {"fidAtSize", rounded(p.fid_at_size)}});
    }
    corrs.push_back({{"modelLabel", c.model_label},
                     {"stat", stat_name(c.stat)},
                     {"size", c.size},
                     {"pairs", pairs},
                     {"spearmanRho", detail::optional_number(c.spearman_rho)}});
  }
  return {{"schema", "v1"},
          {"plateauThreshold", rounded(b.plateau_threshold)},
          {"curves", curves},
          {"meanReductionByModel", reductions},
          {"distributions", dists},
          {"correlations", corrs}};
}

inline ReportBundle report_from_json(const nlohmann::json& j) {
  try {
    ReportBundle b;
    b.plateau_threshold = j.at("plateauThreshold").get<double>();
    for (const auto& c : j.at("curves")) {
      CurveSummary s;
      s.curve.dataset_id = c.at("datasetId").get<std::string>();
      s.curve.model_label = c.at("modelLabel").get<std::string>();
      for (const auto& p : c.at("points")) {
        s.curve.points.push_back({p.at("trainingSize").get<std::size_t>(), p.at("fid").get<double>()});
      }
      s.percent_reduction = detail::read_optional(c.at("percentReduction"));
      for (const auto& sl : c.at("slopes")) {
        s.slopes.push_back({sl.at("fromSize").get<std::size_t>(), sl.at("toSize").get<std::size_t>(),
                            sl.at("slope").get<double>(), sl.at("plateau").get<bool>()});
      }
      b.curves.push_back(std::move(s));
    }
    for (const auto& [model, r] : j.at("meanReductionByModel").items()) {
      b.mean_reduction_by_model[model] = r.get<double>();
    }
    for (const auto& d : j.at("distributions")) b.distributions.push_back(distribution_from_json(d));
    for (const auto& c : j.at("correlations")) {
      CorrelationReport r;
      r.model_label = c.at("modelLabel").get<std::string>();
      r.stat = stat_from_name(c.at("stat").get<std::string>());
      r.size = c.at("size").get<std::size_t>();
      for (const auto& p : c.at("pairs")) {
        r.pairs.push_back({p.at("datasetId").get<std::string>(), p.at("complexityStat").get<double>(),
                           p.at("fidAtSize").get<double>()});
      }
      r.spearman_rho = detail::read_optional(c.at("spearmanRho"));
      b.correlations.push_back(std::move(r));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("report: ") + e.what());
  }
}

inline std::string curve_csv(const FidelityCurve& c) {
  std::ostringstream out;
  out << "size,fid\n";
  for (const auto& p : c.points) out << p.training_size << ',' << format_sig(p.fid) << '\n';
  return out.str();
}

/// Writes <outdir>/report.json, <outdir>/curves/<dataset>_<model>.csv and
/// <outdir>/distributions/<dataset>.csv. Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const std::filesystem::path& outdir,
                                                      const ReportBundle& b) {
  if (b.curves.empty()) throw Error(Errc::DegenerateCurve, "report has no curves");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir / "curves", ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + (outdir / "curves").string());
  std::vector<fs::path> written;
  for (const auto& s : b.curves) {
    const fs::path p = outdir / "curves" /
                       (detail::file_stem_safe(s.curve.dataset_id) + "_" +
                        detail::file_stem_safe(s.curve.model_label) + ".csv");
    detail::write_text_file(p, curve_csv(s.curve));
    written.push_back(p);
  }
  if (!b.distributions.empty()) {
    fs::create_directories(outdir / "distributions", ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + (outdir / "distributions").string());
    for (const auto& d : b.distributions) {
      const fs::path p = outdir / "distributions" / (detail::file_stem_safe(d.dataset_id) + ".csv");
      detail::write_text_file(p, histogram_csv(d));
      written.push_back(p);
    }
  }
  const fs::path report = outdir / "report.json";
  detail::write_text_file(report, to_json(b).dump(2) + "\n");
  written.push_back(report);
  return written;
}

}  // namespace delentkit

#endif  // DELENTKIT_BENCH_HPP
