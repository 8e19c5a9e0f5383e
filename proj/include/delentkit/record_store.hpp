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

#ifndef DELENTKIT_RECORD_STORE_HPP
#define DELENTKIT_RECORD_STORE_HPP

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delentkit/digest.hpp"
#include "delentkit/error.hpp"
#include "delentkit/metrics.hpp"

namespace delentkit {

inline constexpr std::string_view kRecordSchema = "v1";

inline nlohmann::json to_json(const ComplexityRecord& r) {
  return nlohmann::json{
      {"schema", kRecordSchema},
      {"contentHash", to_hex(r.content_hash)},
      {"shannonBits", r.shannon_bits},
      {"glcmBits", r.glcm_bits},
      {"delentropyBits", r.delentropy_bits},
      {"width", r.width},
      {"height", r.height},
      {"toolVersion", r.tool_version},
  };
}

inline ComplexityRecord record_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kRecordSchema) {
      throw Error(Errc::CorruptRecord, "unsupported record schema");
    }
    ComplexityRecord r;
    r.content_hash = digest_from_hex(j.at("contentHash").get<std::string>());
    r.shannon_bits = j.at("shannonBits").get<double>();
    r.glcm_bits = j.at("glcmBits").get<double>();
    r.delentropy_bits = j.at("delentropyBits").get<double>();
    r.width = j.at("width").get<std::size_t>();
    r.height = j.at("height").get<std::size_t>();
    r.tool_version = j.at("toolVersion").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptRecord, e.what());
  } catch (const Error& e) {
    throw Error(Errc::CorruptRecord, e.what());
  }
}

struct StoreDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string message;
};

/// Append-only JSON Lines cache of ComplexityRecords keyed by
/// (content hash, tool version). The tool version embeds the metric
/// parameter fingerprint, so records from other settings never match.
///
/// Appends take an exclusive advisory lock on the file and are written with
/// a single write(2) on an O_APPEND descriptor; a reader either sees a whole
/// line or none of it. On load, later lines win over earlier duplicates and
/// malformed lines are reported without hiding the rest of the file.
class RecordStore {
 public:
  using Key = std::pair<Digest, std::string>;

  explicit RecordStore(std::filesystem::path path) : path_(std::move(path)) {
    reload();
  }

  const std::filesystem::path& path() const noexcept { return path_; }

  void reload() {
    std::lock_guard lock(mu_);
    index_.clear();
    diagnostics_.clear();
    std::error_code ec;
    if (!std::filesystem::exists(path_, ec)) return;
    std::ifstream in(path_);
    if (!in) throw Error(Errc::IoError, "cannot read store " + path_.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        auto rec = record_from_json(nlohmann::json::parse(line));
        Key key{rec.content_hash, rec.tool_version};
        index_[std::move(key)] = std::move(rec);
      } catch (const std::exception& e) {
        diagnostics_.push_back({lineno, e.what()});
      }
    }
    if (in.bad()) throw Error(Errc::IoError, "read failed: " + path_.string());
  }

  std::optional<ComplexityRecord> get(const Digest& hash,
                                      const std::string& tool_version) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(Key{hash, tool_version});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  void put(const ComplexityRecord& rec) {
    const std::string line = to_json(rec).dump() + "\n";
    std::lock_guard lock(mu_);
    append_line(line);
    index_[Key{rec.content_hash, rec.tool_version}] = rec;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return index_.size();
  }

  std::vector<StoreDiagnostic> diagnostics() const {
    std::lock_guard lock(mu_);
    return diagnostics_;
  }

 private:
  void append_line(const std::string& line) {
    if (path_.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path_.parent_path(), ec);
    }
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) {
      throw Error(Errc::IoError,
                  "cannot open store " + path_.string() + ": " + std::strerror(errno));
    }
    struct FdGuard {
      int fd;
      ~FdGuard() {
        ::flock(fd, LOCK_UN);
        ::close(fd);
      }
    } guard{fd};
    if (::flock(fd, LOCK_EX) != 0) {
      throw Error(Errc::IoError, "cannot lock store " + path_.string());
    }
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::IoError,
                    "write to store failed: " + std::string(std::strerror(errno)));
      }
      written += static_cast<std::size_t>(n);
    }
  }

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<Key, ComplexityRecord> index_;
  std::vector<StoreDiagnostic> diagnostics_;
};

}  // namespace delentkit

#endif  // DELENTKIT_RECORD_STORE_HPP
