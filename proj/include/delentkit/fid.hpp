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

#ifndef DELENTKIT_FID_HPP
#define DELENTKIT_FID_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "delentkit/digest.hpp"
#include "delentkit/error.hpp"

namespace delentkit {

/// N samples x D features, all finite.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.cols() == 0) {
      throw Error(Errc::TooFewSamples, "feature matrix is empty");
    }
    if (!values_.allFinite()) {
      throw Error(Errc::NonFiniteInput, "feature matrix contains NaN or Inf");
    }
  }

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Gaussian summary (mu, Sigma) of a feature set.
struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t sample_count = 0;

  Eigen::Index dim() const noexcept { return mean.size(); }
};

inline FeatureStats stats_from_features(const FeatureMatrix& f) {
  if (f.rows() < 2) {
    throw Error(Errc::TooFewSamples,
                "covariance needs at least 2 samples (got " +
                    std::to_string(f.rows()) + ")");
  }
  const Eigen::MatrixXd& x = f.values();
  FeatureStats s;
  s.sample_count = static_cast<std::size_t>(x.rows());
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  const Eigen::MatrixXd c =
      (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
  s.cov = 0.5 * (c + c.transpose());
  return s;
}

/// Relative tolerance below zero within which eigenvalues count as zero.
inline constexpr double kEigenTolerance = 1e-10;

namespace detail {

inline void check_stats(const FeatureStats& s, const char* which) {
  const Eigen::Index d = s.mean.size();
  if (d == 0 || s.cov.rows() != d || s.cov.cols() != d) {
    throw Error(Errc::DimensionMismatch,
                std::string(which) + ": mean/covariance dimensions disagree");
  }
  if (!s.mean.allFinite() || !s.cov.allFinite()) {
    throw Error(Errc::NonFiniteInput, std::string(which) + ": non-finite statistics");
  }
  const double scale = std::max(1.0, s.cov.cwiseAbs().maxCoeff());
  const double asym = (s.cov - s.cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw Error(Errc::NonPsdCovariance,
                std::string(which) + ": covariance is not symmetric");
  }
}

/// Eigenvalues of a symmetric matrix with tiny negative noise clamped to 0.
/// Throws NonPsdCovariance for an eigenvalue below -tol * lambda_max.
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd_eigen(
    const Eigen::MatrixXd& m, const char* what, Eigen::VectorXd& clamped) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) {
    throw Error(Errc::NonFiniteResult, std::string(what) + ": eigendecomposition failed");
  }
  clamped = es.eigenvalues();
  const double lmax = std::max(0.0, clamped.maxCoeff());
  const double tol = kEigenTolerance * lmax;
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    if (clamped[i] < 0.0) {
      if (clamped[i] < -tol) {
        std::ostringstream msg;
        msg << what << ": eigenvalue " << clamped[i]
            << " is negative beyond tolerance (lambda_max " << lmax << ")";
        throw Error(Errc::NonPsdCovariance, msg.str());
      }
      clamped[i] = 0.0;
    }
  }
  return es;
}

}  // namespace detail

/// Frechet distance between two Gaussians,
///   |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)),
/// with Tr((S1 S2)^(1/2)) evaluated as Tr(sqrt(S1^(1/2) S2 S1^(1/2))) so that
/// every intermediate is symmetric PSD.
inline double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
  detail::check_stats(a, "first");
  detail::check_stats(b, "second");
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch,
                "feature dimensions differ: " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }

  Eigen::VectorXd la, lb, lm;
  const auto ea = detail::psd_eigen(a.cov, "first covariance", la);
  detail::psd_eigen(b.cov, "second covariance", lb);

  const Eigen::MatrixXd sqrt_a = ea.eigenvectors() * la.cwiseSqrt().asDiagonal() *
                                 ea.eigenvectors().transpose();
  const Eigen::MatrixXd inner = sqrt_a * (0.5 * (b.cov + b.cov.transpose())) * sqrt_a;
  detail::psd_eigen(inner, "covariance product", lm);

  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double trace_term =
      a.cov.trace() + b.cov.trace() - 2.0 * lm.cwiseSqrt().sum();
  const double fid = mean_term + trace_term;
  if (!std::isfinite(fid)) {
    throw Error(Errc::NonFiniteResult, "Frechet distance is not finite");
  }
  return std::max(0.0, fid);
}

// ---------------------------------------------------------------------------
// Feature files.
//
//   CSV     one sample per row, D numeric columns; a non-numeric first row
//           is treated as a header.
//   binary  "FEAT", u32 LE N, u32 LE D, 4 reserved bytes (zero), then N*D
//           float32 LE row-major.
//   stats   JSON {"dim": D, "mean": [...], "cov": [[...], ...], "n": N}.

inline constexpr char kFeatureMagic[4] = {'F', 'E', 'A', 'T'};
inline constexpr std::size_t kFeatureHeaderBytes = 16;

namespace detail {

inline std::uint32_t read_u32_le(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

inline void write_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

inline FeatureMatrix parse_features_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t lineno = 0;
  bool first_content = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const auto fields = detail::split_csv(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!detail::parse_double(fields[i], row[i])) {
        numeric = false;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      if (!numeric) continue;  // header row
    }
    if (!numeric) {
      throw Error(Errc::ParseError,
                  "line " + std::to_string(lineno) + ": non-numeric feature value");
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols) {
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(cols) + " columns, got " +
                                        std::to_string(row.size()));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw Error(Errc::NonFiniteInput,
                    "line " + std::to_string(lineno) + ": non-finite feature value");
      }
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
    if (nl == text.size()) break;
  }
  if (rows == 0) throw Error(Errc::TooFewSamples, "feature CSV has no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  }
  return FeatureMatrix(std::move(m));
}

inline FeatureMatrix parse_features_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFeatureHeaderBytes ||
      std::memcmp(bytes.data(), kFeatureMagic, 4) != 0) {
    throw Error(Errc::ParseError, "missing FEAT header");
  }
  const std::uint32_t n = detail::read_u32_le(bytes.data() + 4);
  const std::uint32_t d = detail::read_u32_le(bytes.data() + 8);
  const std::uint64_t expected =
      kFeatureHeaderBytes + std::uint64_t{n} * std::uint64_t{d} * 4;
  if (n == 0 || d == 0) throw Error(Errc::TooFewSamples, "FEAT file declares no samples");
  if (bytes.size() != expected) {
    throw Error(Errc::ParseError, "FEAT payload is " + std::to_string(bytes.size()) +
                                      " bytes, header implies " + std::to_string(expected));
  }
  Eigen::MatrixXd m(n, d);
  const std::uint8_t* p = bytes.data() + kFeatureHeaderBytes;
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t c = 0; c < d; ++c, p += 4) {
      const std::uint32_t bits = detail::read_u32_le(p);
      float f;
      std::memcpy(&f, &bits, sizeof f);
      m(r, c) = static_cast<double>(f);
    }
  }
  return FeatureMatrix(std::move(m));
}

inline std::vector<std::uint8_t> encode_features_binary(const FeatureMatrix& f) {
  std::vector<std::uint8_t> out(kFeatureMagic, kFeatureMagic + 4);
  detail::write_u32_le(out, static_cast<std::uint32_t>(f.rows()));
  detail::write_u32_le(out, static_cast<std::uint32_t>(f.cols()));
  detail::write_u32_le(out, 0);
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      const float v = static_cast<float>(f.values()(r, c));
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      detail::write_u32_le(out, bits);
    }
  }
  return out;
}

inline nlohmann::json to_json(const FeatureStats& s) {
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.cov.rows(); ++i) {
    std::vector<double> row(s.cov.cols());
    for (Eigen::Index j = 0; j < s.cov.cols(); ++j) row[j] = s.cov(i, j);
    cov.push_back(row);
  }
  std::vector<double> mean(s.mean.data(), s.mean.data() + s.mean.size());
  return {{"dim", s.dim()}, {"mean", mean}, {"cov", cov}, {"n", s.sample_count}};
}

inline FeatureStats stats_from_json(const nlohmann::json& j) {
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
    if (dim == 0 || mean.size() != dim || cov.size() != dim) {
      throw Error(Errc::DimensionMismatch, "stats document: dim/mean/cov sizes disagree");
    }
    FeatureStats s;
    s.sample_count = j.value("n", std::size_t{0});
    s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(dim));
    s.cov.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      if (cov[i].size() != dim) {
        throw Error(Errc::DimensionMismatch, "stats document: covariance row " +
                                                 std::to_string(i) + " has wrong length");
      }
      for (std::size_t k = 0; k < dim; ++k) s.cov(i, k) = cov[i][k];
    }
    if (!s.mean.allFinite() || !s.cov.allFinite()) {
      throw Error(Errc::NonFiniteInput, "stats document has non-finite values");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("stats document: ") + e.what());
  }
}

using FeatureInput = std::variant<FeatureMatrix, FeatureStats>;

/// Detects binary FEAT, JSON stats or CSV features from the content.
inline FeatureInput parse_feature_input(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kFeatureMagic, 4) == 0) {
    return parse_features_binary(bytes);
  }
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const std::string_view body = detail::trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, std::string("stats document: ") + e.what());
    }
    return stats_from_json(j);
  }
  return parse_features_csv(text);
}

struct FidInputSummary {
  std::filesystem::path path;
  std::string digest;  // SHA-256 of the file bytes, hex
  std::string kind;    // "features" or "stats"
  std::size_t samples = 0;
  std::size_t dim = 0;
};

struct FidReport {
  double fid = 0.0;
  FidInputSummary a;
  FidInputSummary b;
};

inline FeatureStats load_feature_stats(const std::filesystem::path& path,
                                       FidInputSummary* summary = nullptr) {
  try {
    const auto bytes = read_file_bytes(path);
    FeatureInput input = parse_feature_input(bytes);
    FeatureStats s;
    std::string kind;
    if (auto* m = std::get_if<FeatureMatrix>(&input)) {
      s = stats_from_features(*m);
      kind = "features";
    } else {
      s = std::get<FeatureStats>(std::move(input));
      kind = "stats";
    }
    if (summary) {
      *summary = {path, to_hex(Sha256().update(bytes).finish()), kind,
                  s.sample_count, static_cast<std::size_t>(s.dim())};
    }
    return s;
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

inline FidReport fid_from_files(const std::filesystem::path& path_a,
                                const std::filesystem::path& path_b) {
  FidReport r;
  const FeatureStats a = load_feature_stats(path_a, &r.a);
  const FeatureStats b = load_feature_stats(path_b, &r.b);
  try {
    r.fid = frechet_distance(a, b);
  } catch (const Error& e) {
    throw Error(e.code(), path_a.string() + " vs " + path_b.string() + ": " + e.detail());
  }
  return r;
}

inline nlohmann::json to_json(const FidInputSummary& s) {
  return {{"path", s.path.string()}, {"sha256", s.digest}, {"kind", s.kind},
          {"n", s.samples}, {"dim", s.dim}};
}

}  // namespace delentkit

#endif  // DELENTKIT_FID_HPP
