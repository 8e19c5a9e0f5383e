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

#ifndef DELENTKIT_PIPELINE_HPP
#define DELENTKIT_PIPELINE_HPP

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "delentkit/error.hpp"
#include "delentkit/image.hpp"
#include "delentkit/metrics.hpp"
#include "delentkit/record_store.hpp"

namespace delentkit {

inline std::size_t default_jobs() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on `jobs` threads pulling indices from a shared
/// counter. fn must not throw; capture failures per index instead.
template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  if (jobs == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(jobs - 1);
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
}

inline bool has_image_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm";
}

/// Files given directly are kept as-is; directories contribute their
/// .png/.pgm entries (non-recursive). Result sorted by path.
inline std::vector<std::filesystem::path> collect_images(
    const std::vector<std::filesystem::path>& inputs) {
  namespace fs = std::filesystem;
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && has_image_extension(e.path())) out.push_back(e.path());
      }
    } else {
      out.push_back(in);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct BatchOptions {
  MetricParams params;
  std::optional<std::pair<std::size_t, std::size_t>> resize;
  std::size_t jobs = 1;
  RecordStore* store = nullptr;
};

struct ImageOutcome {
  std::filesystem::path path;
  std::optional<ComplexityRecord> record;
  std::string error;  // set when record is absent
  bool cached = false;
};

struct BatchResult {
  std::vector<ImageOutcome> outcomes;  // same order as the input paths
  std::size_t computed = 0;            // metric evaluations performed
  std::size_t cached = 0;              // records served from the store
  std::size_t failed = 0;
};

/// Loads, optionally resizes, and scores every image. Records already in the
/// store under the same (content hash, tool version) are reused without
/// recomputation; new records are appended to the store.
inline BatchResult compute_records(const std::vector<std::filesystem::path>& paths,
                                   const BatchOptions& opts) {
  BatchResult result;
  result.outcomes.resize(paths.size());
  std::atomic<std::size_t> computed{0}, cached{0};
  const std::string version = tool_version(opts.params);

  parallel_for(paths.size(), opts.jobs, [&](std::size_t i) {
    ImageOutcome& out = result.outcomes[i];
    out.path = paths[i];
    try {
      GrayImage img = load_grayscale(paths[i]);
      if (opts.resize) img = resize_bilinear(img, opts.resize->first, opts.resize->second);
      if (opts.store) {
        if (auto hit = opts.store->get(content_hash(img), version)) {
          out.record = std::move(hit);
          out.cached = true;
          cached.fetch_add(1);
          return;
        }
      }
      ComplexityRecord rec = complexity_record(img, opts.params);
      computed.fetch_add(1);
      if (opts.store) opts.store->put(rec);
      out.record = std::move(rec);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  result.computed = computed.load();
  result.cached = cached.load();
  for (const auto& o : result.outcomes) {
    if (!o.record) ++result.failed;
  }
  return result;
}

}  // namespace delentkit

#endif  // DELENTKIT_PIPELINE_HPP
