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
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "delentkit/delentkit.hpp"
#include "test_util.hpp"

namespace delentkit {
namespace {

namespace fs = std::filesystem;
using delentkit::testing::TempDir;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  RunResult run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + DELENTKIT_CLI_PATH + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }

  fs::path write_random_images(const std::string& name, int n, std::uint64_t seed) {
    const fs::path d = dir_ / name;
    fs::create_directories(d);
    std::mt19937_64 gen(seed);
    for (int i = 0; i < n; ++i) {
      save_png(d / ("img_" + std::to_string(1000 + i) + ".png"),
               delentkit::testing::random_image(24, 24, gen));
    }
    return d;
  }

  TempDir dir_;
};

TEST_F(CliTest, ConstantImageScoresZero) {
  save_png(dir_ / "flat.png", GrayImage(16, 16, 77));
  const RunResult r = run("complexity " + q(dir_ / "flat.png"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["records"].size(), 1u);
  const json& rec = j["records"][0];
  EXPECT_EQ(rec["shannonBits"].get<double>(), 0.0);
  EXPECT_EQ(rec["glcmBits"].get<double>(), 0.0);
  EXPECT_EQ(rec["delentropyBits"].get<double>(), 0.0);
  EXPECT_EQ(rec["width"], 16);
}

TEST_F(CliTest, CorruptImageGivesPartialExit) {
  const fs::path d = write_random_images("mixed", 2, 5);
  std::ofstream(d / "bad.png") << "garbage";
  const RunResult r = run("complexity " + q(d));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(json::parse(r.out)["records"].size(), 2u);
  EXPECT_NE(r.err.find("bad.png"), std::string::npos);
  EXPECT_NE(r.err.find("failed: 1"), std::string::npos);
}

TEST_F(CliTest, AllFailuresAreFatal) {
  std::ofstream(dir_ / "bad.png") << "garbage";
  EXPECT_EQ(run("complexity " + q(dir_ / "bad.png")).exit_code, 1);
  EXPECT_EQ(run("complexity " + q(dir_ / "nope.png")).exit_code, 1);
}

TEST_F(CliTest, WarmStoreReproducesOutput) {
  const fs::path d = write_random_images("ds", 6, 9);
  const std::string args =
      "--store " + q(dir_ / "store.jsonl") + " --format csv complexity " + q(d);
  const RunResult cold = run(args);
  ASSERT_EQ(cold.exit_code, 0) << cold.err;
  EXPECT_NE(cold.err.find("computed: 6 cached: 0"), std::string::npos);
  const RunResult warm = run(args);
  ASSERT_EQ(warm.exit_code, 0);
  EXPECT_NE(warm.err.find("computed: 0 cached: 6"), std::string::npos);
  EXPECT_EQ(cold.out, warm.out);
}

TEST_F(CliTest, DatasetStatsMatchesLibrary) {
  const fs::path d = write_random_images("cats", 5, 13);
  const RunResult r = run("dataset-stats " + q(d) + " --metric delentropy");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const DatasetDistribution got = distribution_from_json(json::parse(r.out));
  EXPECT_EQ(got.dataset_id, "cats");
  std::vector<ComplexityRecord> recs;
  for (const auto& p : collect_images({d})) {
    recs.push_back(complexity_record(load_grayscale(p), MetricParams{}));
  }
  EXPECT_EQ(got, aggregate(recs, Metric::Delentropy, "cats"));
  EXPECT_TRUE(json::parse(r.out).contains("spread"));
}

TEST_F(CliTest, DatasetStatsRejectsEmptyDataset) {
  fs::create_directories(dir_ / "empty");
  const RunResult r = run("dataset-stats " + q(dir_ / "empty"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST_F(CliTest, FidFromStatsDocuments) {
  std::ofstream(dir_ / "a.json") << R"({"dim":1,"mean":[0],"cov":[[1]],"n":10})";
  std::ofstream(dir_ / "b.json") << R"({"dim":1,"mean":[1],"cov":[[1]],"n":10})";
  const RunResult r = run("--format text fid " + q(dir_ / "a.json") + " " + q(dir_ / "b.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "1\n");
}

TEST_F(CliTest, FidOfIdenticalFeaturesIsZero) {
  std::ofstream(dir_ / "f.csv") << "a,b\n1,2\n3,5\n4,4\n0,1\n";
  const RunResult r = run("fid " + q(dir_ / "f.csv") + " " + q(dir_ / "f.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["fid"].get<double>(), 0.0, 1e-9);
  EXPECT_EQ(j["a"]["n"], 4);
}

TEST_F(CliTest, FidDimensionMismatchFails) {
  std::ofstream(dir_ / "a.csv") << "1,2\n3,4\n";
  std::ofstream(dir_ / "b.csv") << "1,2,3\n3,4,5\n";
  const RunResult r = run("fid " + q(dir_ / "a.csv") + " " + q(dir_ / "b.csv"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("DimensionMismatch"), std::string::npos);
}

TEST_F(CliTest, SampleIsDeterministic) {
  const fs::path d = write_random_images("pool", 10, 21);
  const std::string args = "--seed 2025 sample " + q(d) + " --size 4 --dataset-id pool";
  const RunResult a = run(args);
  const RunResult b = run(args);
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const SampleManifest m = manifest_from_json(json::parse(a.out));
  EXPECT_EQ(m.members.size(), 4u);
  EXPECT_EQ(m.seed, 2025u);
  const RunResult other = run("--seed 7 sample " + q(d) + " --size 4 --dataset-id pool");
  EXPECT_NE(a.out, other.out);
}

TEST_F(CliTest, SampleRequiresSeedAndFeasibleSize) {
  const fs::path d = write_random_images("pool", 3, 1);
  EXPECT_EQ(run("sample " + q(d) + " --size 2").exit_code, 1);
  const RunResult r = run("--seed 1 sample " + q(d) + " --size 4");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("SizeExceedsDataset"), std::string::npos);
}

class CliCurveTest : public CliTest {
 protected:
  void write_distribution(const std::string& id, std::vector<double> values) {
    std::vector<ComplexityRecord> recs;
    for (double v : values) {
      ComplexityRecord r;
      r.delentropy_bits = v;
      recs.push_back(r);
    }
    std::ofstream(dir_ / (id + ".json"))
        << to_json(aggregate(recs, Metric::Delentropy, id)).dump(2);
  }

  std::string dist_args(const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) s += " --distribution " + q(dir_ / (id + ".json"));
    return s;
  }
};

TEST_F(CliCurveTest, ReportShowsReductionsAndNegativeRho) {
  std::ofstream(dir_ / "fid.csv") << "dataset_id,model_label,training_size,fid\n"
                                     "a,gan,1000,100\na,gan,5000,52\n"
                                     "b,gan,1000,80\nb,gan,5000,55.2\n"
                                     "c,gan,1000,60\nc,gan,5000,45\n";
  // stddev order b < a < c, FID at 5000 order c < a < b
  write_distribution("a", {4.0, 5.0, 6.0});
  write_distribution("b", {4.8, 5.0, 5.2});
  write_distribution("c", {2.0, 5.0, 8.0});
  const RunResult r = run("--out " + q(dir_ / "report") + " curve --fid-table " +
                          q(dir_ / "fid.csv") + dist_args({"a", "b", "c"}));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(slurp(dir_ / "report" / "report.json"));
  EXPECT_EQ(j, json::parse(r.out));
  EXPECT_EQ(j["curves"][0]["percentReduction"].get<double>(), 0.48);
  EXPECT_EQ(j["curves"][1]["percentReduction"].get<double>(), 0.31);
  EXPECT_EQ(j["curves"][2]["percentReduction"].get<double>(), 0.25);
  ASSERT_EQ(j["correlations"].size(), 1u);
  EXPECT_EQ(j["correlations"][0]["spearmanRho"].get<double>(), -1.0);
  EXPECT_TRUE(fs::exists(dir_ / "report" / "curves" / "a_gan.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "report" / "distributions" / "c.csv"));
}

TEST_F(CliCurveTest, SingleDatasetHasNoRho) {
  std::ofstream(dir_ / "fid.csv") << "dataset_id,model_label,training_size,fid\n"
                                     "a,gan,1000,100\na,gan,5000,52\n";
  write_distribution("a", {4.0, 5.0, 6.0});
  const RunResult r = run("--out " + q(dir_ / "report") + " curve --fid-table " +
                          q(dir_ / "fid.csv") + dist_args({"a"}));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["correlations"][0]["spearmanRho"].is_null());
}

TEST_F(CliCurveTest, MissingOutIsFatal) {
  std::ofstream(dir_ / "fid.csv") << "dataset_id,model_label,training_size,fid\na,gan,1,2\n";
  EXPECT_EQ(run("curve --fid-table " + q(dir_ / "fid.csv")).exit_code, 1);
}

TEST_F(CliTest, HelpListsEveryFlag) {
  const RunResult r = run("--help");
  EXPECT_EQ(r.exit_code, 0);
  for (const char* flag : {"--jobs", "--format", "--store", "--resize", "--seed", "--out",
                           "--glcm-distance", "--glcm-angle", "--glcm-symmetric", "--kernel",
                           "complexity", "dataset-stats", "fid", "sample", "curve"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
}

TEST_F(CliTest, VersionCarriesParameterFingerprint) {
  const RunResult r = run("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find(tool_version(MetricParams{})), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsFatal) {
  EXPECT_EQ(run("--bogus complexity x.png").exit_code, 1);
}

}  // namespace
}  // namespace delentkit
