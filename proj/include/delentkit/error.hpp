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

#ifndef DELENTKIT_ERROR_HPP
#define DELENTKIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace delentkit {

enum class Errc {
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  ZeroDimension,
  ImageTooSmall,
  OffsetTooLarge,
  EmptyDataset,
  DegenerateDistribution,
  IoError,
  CorruptRecord,
  TooFewSamples,
  NonFiniteInput,
  DimensionMismatch,
  NonPsdCovariance,
  NonFiniteResult,
  ParseError,
  SizeExceedsDataset,
  EmptyListing,
  DegenerateCurve,
  DivisionByZero,
  MissingDataset,
  MissingSizePoint,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptImage: return "CorruptImage";
    case Errc::ZeroDimension: return "ZeroDimension";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::OffsetTooLarge: return "OffsetTooLarge";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::DegenerateDistribution: return "DegenerateDistribution";
    case Errc::IoError: return "IoError";
    case Errc::CorruptRecord: return "CorruptRecord";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonPsdCovariance: return "NonPsdCovariance";
    case Errc::NonFiniteResult: return "NonFiniteResult";
    case Errc::ParseError: return "ParseError";
    case Errc::SizeExceedsDataset: return "SizeExceedsDataset";
    case Errc::EmptyListing: return "EmptyListing";
    case Errc::DegenerateCurve: return "DegenerateCurve";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::MissingDataset: return "MissingDataset";
    case Errc::MissingSizePoint: return "MissingSizePoint";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception; `code()` is the
/// stable, machine-checkable part and `what()` carries human context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace delentkit

#endif  // DELENTKIT_ERROR_HPP
