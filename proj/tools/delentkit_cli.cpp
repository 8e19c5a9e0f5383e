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

// delentkit: dataset complexity, FID and fidelity-curve toolkit.
//
// Exit codes: 0 success, 1 fatal error, 2 partial success (some inputs
// failed; failures are listed on stderr).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "delentkit/delentkit.hpp"

namespace fs = std::filesystem;
using namespace delentkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct SharedFlags {
  std::size_t jobs = default_jobs();
  std::string format = "json";
  std::string store;
  std::string resize;
  std::optional<std::uint64_t> seed;
  std::string out;

  // metric knobs
  int glcm_distance = 1;
  int glcm_angle = 0;
  bool glcm_symmetric = false;
  std::string kernel = "forward";
};

MetricParams metric_params(const SharedFlags& f) {
  MetricParams p;
  p.glcm_offset.distance = f.glcm_distance;
  p.glcm_offset.angle = glcm_angle_from_degrees(f.glcm_angle);
  p.glcm_symmetric = f.glcm_symmetric;
  if (f.kernel == "forward") {
    p.kernel = GradientKernel::ForwardDifference2x2;
  } else if (f.kernel == "central") {
    p.kernel = GradientKernel::CentralDifference;
  } else {
    throw Error(Errc::InvalidArgument, "--kernel must be forward or central");
  }
  return p;
}

std::optional<std::pair<std::size_t, std::size_t>> parse_resize(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto x = s.find_first_of("xX");
  std::size_t w = 0, h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    w = std::stoul(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    h = std::stoul(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "--resize expects WxH, got '" + s + "'");
  }
  if (w == 0 || h == 0) throw Error(Errc::ZeroDimension, "--resize dimensions must be >= 1");
  return std::pair{w, h};
}

/// Writes `text` to <out>/<name> when --out is set, else to stdout.
void emit(const SharedFlags& f, const std::string& name, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::error_code ec;
  fs::create_directories(f.out, ec);
  const fs::path p = fs::path(f.out) / name;
  std::ofstream o(p, std::ios::binary);
  if (!o || !(o << text)) throw Error(Errc::IoError, "cannot write " + p.string());
  std::cerr << "wrote " << p.string() << "\n";
}

std::unique_ptr<RecordStore> open_store(const SharedFlags& f) {
  if (f.store.empty()) return nullptr;
  auto s = std::make_unique<RecordStore>(f.store);
  for (const auto& d : s->diagnostics()) {
    std::cerr << "warning: " << f.store << ":" << d.line << ": skipped corrupt record ("
              << d.message << ")\n";
  }
  return s;
}

BatchResult run_batch(const std::vector<std::string>& inputs, const SharedFlags& f,
                      RecordStore* store) {
  std::vector<fs::path> in(inputs.begin(), inputs.end());
  const auto paths = collect_images(in);
  BatchOptions opts;
  opts.params = metric_params(f);
  opts.resize = parse_resize(f.resize);
  opts.jobs = f.jobs;
  opts.store = store;
  BatchResult r = compute_records(paths, opts);
  for (const auto& o : r.outcomes) {
    if (!o.record) std::cerr << "error: " << o.error << "\n";
  }
  std::cerr << "images: " << r.outcomes.size() << " computed: " << r.computed
            << " cached: " << r.cached << " failed: " << r.failed << "\n";
  return r;
}

int batch_exit_code(const BatchResult& r) {
  if (r.outcomes.empty() || r.failed == r.outcomes.size()) return kExitFatal;
  return r.failed > 0 ? kExitPartial : kExitOk;
}

int cmd_complexity(const std::vector<std::string>& inputs, const SharedFlags& f) {
  auto store = open_store(f);
  const BatchResult r = run_batch(inputs, f, store.get());
  if (r.outcomes.empty()) {
    std::cerr << "error: no images given\n";
    return kExitFatal;
  }
  std::ostringstream out;
  if (f.format == "json") {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& o : r.outcomes) {
      if (!o.record) continue;
      nlohmann::json j = to_json(*o.record);
      j["path"] = o.path.string();
      recs.push_back(std::move(j));
    }
    out << nlohmann::json{{"schema", "v1"}, {"records", recs}}.dump(2) << "\n";
  } else {
    const char sep = f.format == "csv" ? ',' : '\t';
    out << "path" << sep << "content_hash" << sep << "width" << sep << "height" << sep
        << "shannon_bits" << sep << "glcm_bits" << sep << "delentropy_bits" << sep
        << "tool_version\n";
    for (const auto& o : r.outcomes) {
      if (!o.record) continue;
      const auto& rec = *o.record;
      out << o.path.string() << sep << to_hex(rec.content_hash) << sep << rec.width << sep
          << rec.height << sep << format_sig(rec.shannon_bits) << sep
          << format_sig(rec.glcm_bits) << sep << format_sig(rec.delentropy_bits) << sep
          << rec.tool_version << "\n";
    }
  }
  emit(f, "complexity." + f.format, out.str());
  return batch_exit_code(r);
}

int cmd_dataset_stats(const std::vector<std::string>& inputs, const std::string& metric_flag,
                      double bin_width, std::string dataset_id, const SharedFlags& f) {
  const Metric metric = metric_from_name(metric_flag);
  auto store = open_store(f);
  const BatchResult r = run_batch(inputs, f, store.get());
  std::vector<ComplexityRecord> records;
  for (const auto& o : r.outcomes) {
    if (o.record) records.push_back(*o.record);
  }
  if (records.empty()) {
    std::cerr << "error: dataset is empty (no processable images)\n";
    return kExitFatal;
  }
  if (dataset_id.empty()) {
    fs::path first = fs::weakly_canonical(fs::path(inputs.front()));
    dataset_id = fs::is_directory(first) ? first.filename().string() : first.stem().string();
  }
  HistogramSpec spec;
  spec.bin_width = bin_width;
  const DatasetDistribution d = aggregate(records, metric, dataset_id, spec);

  std::ostringstream out;
  if (f.format == "json") {
    nlohmann::json j = to_json(d);
    if (d.count >= 2) j["spread"] = to_json(spread_descriptors(d));
    out << j.dump(2) << "\n";
  } else if (f.format == "csv") {
    out << histogram_csv(d);
  } else {
    out << "dataset " << d.dataset_id << " metric " << metric_name(d.metric) << "\n"
        << "count " << d.count << "\nmean " << format_sig(d.mean) << "\nstddev "
        << format_sig(d.std_dev) << "\nmin " << format_sig(d.min) << "\nmax "
        << format_sig(d.max) << "\n";
    if (d.count >= 2) {
      const auto s = spread_descriptors(d);
      out << "cv "
          << (s.coefficient_of_variation ? format_sig(*s.coefficient_of_variation) : "n/a")
          << "\niqr " << format_sig(s.iqr) << "\nmodes " << s.modes << "\n";
    }
  }
  if (d.out_of_range > 0) {
    std::cerr << "warning: " << d.out_of_range << " values outside histogram range\n";
  }
  emit(f, d.dataset_id + (f.format == "json" ? ".json" : f.format == "csv" ? ".csv" : ".txt"),
       out.str());
  return batch_exit_code(r);
}

int cmd_fid(const std::string& a, const std::string& b, const SharedFlags& f) {
  const FidReport r = fid_from_files(a, b);
  std::ostringstream out;
  if (f.format == "json") {
    out << nlohmann::json{{"fid", round_sig(r.fid)}, {"a", to_json(r.a)}, {"b", to_json(r.b)}}
               .dump(2)
        << "\n";
  } else if (f.format == "csv") {
    out << "fid,n_a,dim_a,sha256_a,n_b,dim_b,sha256_b\n"
        << format_sig(r.fid) << ',' << r.a.samples << ',' << r.a.dim << ',' << r.a.digest << ','
        << r.b.samples << ',' << r.b.dim << ',' << r.b.digest << "\n";
  } else {
    out << format_sig(r.fid) << "\n";
  }
  emit(f, "fid." + f.format, out.str());
  return kExitOk;
}

std::vector<fs::path> read_listing(const std::string& listing) {
  if (fs::is_directory(listing)) return collect_images({fs::path(listing)});
  std::ifstream in(listing);
  if (!in) throw Error(Errc::FileNotFound, listing);
  std::vector<fs::path> paths;
  const fs::path base = fs::path(listing).parent_path();
  std::string line;
  while (std::getline(in, line)) {
    const auto t = std::string(detail::trim(line));
    if (t.empty() || t.front() == '#') continue;
    fs::path p(t);
    paths.push_back(p.is_absolute() ? p : base / p);
  }
  return paths;
}

int cmd_sample(const std::string& listing, std::size_t size, std::string dataset_id,
               const SharedFlags& f) {
  if (!f.seed) {
    std::cerr << "error: sample requires an explicit --seed\n";
    return kExitFatal;
  }
  const auto paths = read_listing(listing);
  std::vector<ListingEntry> entries(paths.size());
  std::vector<std::string> errors(paths.size());
  const auto resize = parse_resize(f.resize);
  parallel_for(paths.size(), f.jobs, [&](std::size_t i) {
    try {
      GrayImage img = load_grayscale(paths[i]);
      if (resize) img = resize_bilinear(img, resize->first, resize->second);
      entries[i] = {paths[i].generic_string(), content_hash(img)};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) {
      std::cerr << "error: " << e << "\n";
      return kExitFatal;
    }
  }
  if (dataset_id.empty()) dataset_id = fs::weakly_canonical(fs::path(listing)).stem().string();
  const SampleManifest m = sample_subset(entries, size, *f.seed, dataset_id);
  emit(f, detail::file_stem_safe(dataset_id) + "_n" + std::to_string(size) + "_s" +
              std::to_string(*f.seed) + ".json",
       manifest_text(m));
  return kExitOk;
}

int cmd_curve(const std::string& table, const std::vector<std::string>& dist_files,
              std::optional<std::size_t> at_size, const std::string& stat,
              double plateau_threshold, const SharedFlags& f) {
  if (f.out.empty()) {
    std::cerr << "error: curve requires --out DIR\n";
    return kExitFatal;
  }
  const auto curves = load_fid_table(table);
  std::vector<DatasetDistribution> dists;
  for (const auto& p : dist_files) {
    std::ifstream in(p);
    if (!in) throw Error(Errc::FileNotFound, p);
    try {
      dists.push_back(distribution_from_json(nlohmann::json::parse(in)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, p + ": " + e.what());
    }
  }
  ReportOptions opts;
  opts.at_size = at_size;
  opts.stat = stat_from_name(stat);
  opts.plateau_threshold = plateau_threshold;
  const ReportBundle bundle = build_report(curves, dists, opts);
  for (const auto& p : emit_report(f.out, bundle)) std::cerr << "wrote " << p.string() << "\n";
  if (f.format == "json") std::cout << to_json(bundle).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delentkit: image-dataset complexity (Shannon, GLCM, delentropy), "
               "Frechet Inception Distance and fidelity-curve reports"};
  app.set_version_flag("--version", tool_version(MetricParams{}));
  app.require_subcommand(1);
  app.fallthrough();

  SharedFlags f;
  app.add_option("--jobs", f.jobs, "Worker threads for per-image work")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--store", f.store, "JSON Lines record cache (read and appended)");
  app.add_option("--resize", f.resize, "Resize images to WxH (bilinear) before scoring");
  app.add_option("--seed", f.seed, "Seed for subset sampling (unsigned 64-bit)");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--glcm-distance", f.glcm_distance, "GLCM pixel distance")
      ->check(CLI::PositiveNumber);
  app.add_option("--glcm-angle", f.glcm_angle, "GLCM angle in degrees")
      ->check(CLI::IsMember({0, 45, 90, 135}));
  app.add_flag("--glcm-symmetric", f.glcm_symmetric, "Count GLCM pairs in both directions");
  app.add_option("--kernel", f.kernel, "Gradient kernel for delentropy")
      ->check(CLI::IsMember({"forward", "central"}));

  std::vector<std::string> complexity_inputs;
  auto* complexity = app.add_subcommand("complexity", "Per-image complexity records");
  complexity->add_option("inputs", complexity_inputs, "Image files or directories")
      ->required();

  std::vector<std::string> stats_inputs;
  std::string metric = "delentropy";
  double bin_width = 0.25;
  std::string stats_dataset_id;
  auto* dstats = app.add_subcommand("dataset-stats", "Distribution of one metric over a dataset");
  dstats->add_option("inputs", stats_inputs, "Image files or directories")->required();
  dstats->add_option("--metric", metric, "Metric to aggregate")
      ->check(CLI::IsMember({"shannon", "glcm", "delentropy"}));
  dstats->add_option("--bin-width", bin_width, "Histogram bin width in bits")
      ->check(CLI::PositiveNumber);
  dstats->add_option("--dataset-id", stats_dataset_id, "Dataset identifier");

  std::string fid_a, fid_b;
  auto* fid = app.add_subcommand("fid", "Frechet distance between two feature files");
  fid->add_option("features_a", fid_a, "CSV, FEAT binary or stats JSON")->required();
  fid->add_option("features_b", fid_b, "CSV, FEAT binary or stats JSON")->required();

  std::string listing;
  std::size_t sample_size = 0;
  std::string sample_dataset_id;
  auto* sample = app.add_subcommand("sample", "Seeded training-subset manifest");
  sample->add_option("listing", listing, "Image directory or text file of paths")->required();
  sample->add_option("--size", sample_size, "Number of images to draw")->required();
  sample->add_option("--dataset-id", sample_dataset_id, "Dataset identifier");

  std::string table;
  std::vector<std::string> dist_files;
  std::optional<std::size_t> at_size;
  std::string stat = "stddev";
  double plateau = kDefaultPlateauThreshold;
  auto* curve = app.add_subcommand("curve", "Fidelity curves, reductions and correlation report");
  curve->add_option("--fid-table", table,
                    "CSV: dataset_id,model_label,training_size,fid or "
                    "dataset_id,model_label,training_size,real_features,generated_features")
      ->required();
  curve->add_option("--distribution", dist_files, "dataset-stats JSON document (repeatable)");
  curve->add_option("--at-size", at_size, "Training size compared across datasets");
  curve->add_option("--stat", stat, "Complexity statistic")
      ->check(CLI::IsMember({"mean", "stddev", "cv"}));
  curve->add_option("--plateau-threshold", plateau, "|slope| below which an interval is a plateau");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*complexity) return cmd_complexity(complexity_inputs, f);
    if (*dstats) return cmd_dataset_stats(stats_inputs, metric, bin_width, stats_dataset_id, f);
    if (*fid) return cmd_fid(fid_a, fid_b, f);
    if (*sample) return cmd_sample(listing, sample_size, sample_dataset_id, f);
    if (*curve) return cmd_curve(table, dist_files, at_size, stat, plateau, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
