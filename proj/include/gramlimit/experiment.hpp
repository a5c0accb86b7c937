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

#ifndef GRAMLIMIT_EXPERIMENT_HPP_
#define GRAMLIMIT_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gramlimit/config.hpp"

namespace gramlimit {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::string version;
  /// Wall-clock seconds per stage, in execution order.
  std::vector<std::pair<std::string, double>> timings;
  std::vector<Check> checks;
  std::vector<std::uint64_t> seeds;
  /// "pass", "fail" (a threshold missed) or "error" (a stage threw).
  std::string status = "pass";
  std::string failure_stage;
  std::string error;
  /// Artifact file names relative to the output directory, sorted.
  std::vector<std::string> artifacts;
  /// FNV-1a over the sorted artifacts' names and bytes (timings excluded).
  std::uint64_t artifact_hash = 0;
  nlohmann::json summary = nlohmann::json::object();
  std::filesystem::path output_dir;

  nlohmann::json to_json() const;
};

struct RunOptions {
  /// Base for relative output and cache directories.
  std::filesystem::path output_root = "runs";
  /// Progress and summary lines; null for silence.
  std::ostream* log = nullptr;
};

/// GRAMLIMIT_OUTPUT_ROOT if set, else "runs".
std::filesystem::path default_output_root();

/// Runs the configured command. Artifacts are written to a staging directory
/// that replaces the output directory only when the run finishes; a run that
/// throws leaves just manifest.json there, naming the failed stage.
RunManifest run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

RunManifest run_solve(const ExperimentConfig& config, const RunOptions& options = {});
RunManifest run_simulate(const ExperimentConfig& config, const RunOptions& options = {});
RunManifest run_compare(const ExperimentConfig& config, const RunOptions& options = {});
RunManifest run_universality(const ExperimentConfig& config, const RunOptions& options = {});
RunManifest run_toeplitz(const ExperimentConfig& config, const RunOptions& options = {});
RunManifest run_truncation(const ExperimentConfig& config, const RunOptions& options = {});

/// 0 when every check passed, 1 when a threshold failed, 3 on a runtime error.
int exit_code(const RunManifest& manifest);

/// Median of a nonempty list (mean of the middle pair for even sizes).
double median(std::vector<double> values);

}  // namespace gramlimit

#endif  // GRAMLIMIT_EXPERIMENT_HPP_
