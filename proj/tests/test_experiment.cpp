// Copyright 2026 The gramlimit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gramlimit/config.hpp"
#include "gramlimit/experiment.hpp"
#include "gramlimit/io.hpp"

namespace gramlimit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Runs : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            (std::string("gramlimit-exp-") +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
    opt_.output_root = root_;
  }
  void TearDown() override { fs::remove_all(root_); }

  std::vector<std::string> listing(const fs::path& dir) const {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
  }

  fs::path root_;
  RunOptions opt_;
};

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), DomainError);
}

TEST(ExitCode, Statuses) {
  RunManifest m;
  EXPECT_EQ(exit_code(m), 0);
  m.status = "fail";
  EXPECT_EQ(exit_code(m), 1);
  m.status = "error";
  EXPECT_EQ(exit_code(m), 3);
}

TEST_F(Runs, SolvePassesAndWritesManifest) {
  const ExperimentConfig cfg =
      parse_config(R"({"command": "solve", "c": 0.5, "output_dir": "solve"})");
  const RunManifest m = run_experiment(cfg, opt_);
  EXPECT_EQ(m.status, "pass");
  EXPECT_EQ(exit_code(m), 0);
  EXPECT_FALSE(m.checks.empty());
  const json j = json::parse(read_file(root_ / "solve" / "manifest.json"));
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["command"], "solve");
  for (const char* a : {"limit.csv", "limit.json", "stieltjes.csv"}) {
    EXPECT_TRUE(fs::exists(root_ / "solve" / a)) << a;
  }
  EXPECT_FALSE(fs::exists(root_ / ".solve.staging"));
}

TEST_F(Runs, CompareIsReproducible) {
  const std::string text = R"({
    "command": "compare", "sizes": [[200, 100], [800, 400]], "seeds": [1, 2],
    "output_dir": "cmp", "thresholds": {"compare": 0.2}
  })";
  const ExperimentConfig cfg = parse_config(text);
  const RunManifest a = run_experiment(cfg, opt_);
  EXPECT_EQ(a.status, "pass") << a.error;
  const fs::path dir = root_ / "cmp";
  EXPECT_TRUE(fs::exists(dir / "limit_c1_2.csv"));
  const json sidecar = json::parse(read_file(dir / "limit_c1_2.json"));
  EXPECT_EQ(sidecar["c"].get<double>(), 0.5);

  std::vector<std::string> bytes;
  for (const std::string& name : a.artifacts) bytes.push_back(read_file(dir / name));

  const RunManifest b = run_experiment(parse_config(text), opt_);
  EXPECT_EQ(a.artifact_hash, b.artifact_hash);
  ASSERT_EQ(a.artifacts, b.artifacts);
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    EXPECT_EQ(read_file(dir / a.artifacts[i]), bytes[i]) << a.artifacts[i];
  }
  EXPECT_FALSE(fs::exists(root_ / ".cmp.old"));
}

TEST_F(Runs, CacheOffGivesSameArtifacts) {
  const std::string base = R"("command": "simulate", "sizes": [[60, 30]], "seeds": [9])";
  const RunManifest a =
      run_experiment(parse_config("{" + base + R"(, "output_dir": "a"})"), opt_);
  const RunManifest b = run_experiment(
      parse_config("{" + base + R"(, "output_dir": "b", "cache_dir": "off"})"), opt_);
  EXPECT_EQ(a.artifact_hash, b.artifact_hash);
  EXPECT_TRUE(fs::exists(root_ / "cache"));
}

TEST_F(Runs, FailedStageLeavesOnlyManifest) {
  // A fractional filter cannot reach a 1e-6 tail within the width cap.
  const ExperimentConfig cfg = parse_config(R"({
    "command": "simulate", "density": {"family": "fractional", "d": 0.4},
    "ensemble": {"source": "filter", "tail_tol": 1e-6, "max_half_width": 64},
    "sizes": [[40, 20]], "seeds": [1], "output_dir": "bad"
  })");
  const RunManifest m = run_experiment(cfg, opt_);
  EXPECT_EQ(m.status, "error");
  EXPECT_EQ(exit_code(m), 3);
  EXPECT_EQ(m.failure_stage, "prepare");
  EXPECT_EQ(listing(root_ / "bad"), std::vector<std::string>{"manifest.json"});
  const json j = json::parse(read_file(root_ / "bad" / "manifest.json"));
  EXPECT_EQ(j["failure_stage"], "prepare");
  EXPECT_FALSE(j["error"].get<std::string>().empty());
}

TEST_F(Runs, ThresholdMissIsFailNotError) {
  const ExperimentConfig cfg = parse_config(R"({
    "command": "compare", "sizes": [[40, 20]], "seeds": [1],
    "thresholds": {"compare": 1e-9}, "output_dir": "strict"
  })");
  const RunManifest m = run_experiment(cfg, opt_);
  EXPECT_EQ(m.status, "fail");
  EXPECT_EQ(exit_code(m), 1);
  EXPECT_TRUE(fs::exists(root_ / "strict" / "summary.csv"));
}

TEST_F(Runs, CommandMismatchThrows) {
  const ExperimentConfig cfg = parse_config(R"({"command": "solve"})");
  EXPECT_THROW(run_compare(cfg, opt_), DomainError);
}

}  // namespace
}  // namespace gramlimit
