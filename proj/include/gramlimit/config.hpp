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

#ifndef GRAMLIMIT_CONFIG_HPP_
#define GRAMLIMIT_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gramlimit/common.hpp"
#include "gramlimit/ensemble.hpp"
#include "gramlimit/limit.hpp"
#include "gramlimit/spectral.hpp"

namespace gramlimit {

enum class Command { kSolve, kSimulate, kCompare, kToeplitz, kUniversality, kTruncation };

std::string_view to_string(Command command);
std::optional<Command> command_from_string(std::string_view name);

/// Every problem found in a config, not only the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class RowSource { kGaussianDensity, kFilter, kCausalFilter, kToeplitz };

struct EnsembleSettings {
  RowSource source = RowSource::kGaussianDensity;
  std::string innovation = "gaussian";
  /// Law of the reference ensemble in universality runs.
  std::string reference_innovation = "gaussian";
  double nu = 0.0;
  double tail_tol = 1e-6;
  std::size_t max_half_width = 8192;
};

struct Thresholds {
  /// "levy" or "kolmogorov"; the metric compare runs are judged on.
  std::string metric;
  double compare = 0.0;
  double universality = 0.05;
  double toeplitz = 0.05;
  double ladder = 0.01;
  bool require_decreasing = true;
};

struct ExperimentConfig {
  Command command = Command::kSolve;
  SpectralDensity density = SpectralDensity::constant(1.0);
  Rational c{1, 2};
  /// (N, p) pairs, sorted by N.
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  std::vector<std::size_t> toeplitz_p;
  std::vector<double> truncation_b;
  EnsembleSettings ensemble;
  SolverSettings solver;
  /// Empty means auto_x_grid with `x_points` bulk points.
  std::vector<double> x_grid;
  std::size_t x_points = 600;
  std::vector<double> eps_ladder;
  std::vector<Complex> z_grid;
  std::vector<std::uint64_t> seeds;
  Thresholds thresholds;
  std::string output_dir;
  std::string cache_dir;
  bool emit_plots = false;
  bool export_csv = false;
  unsigned workers = 1;

  /// Fully resolved config (defaults filled); hashed for the manifest.
  nlohmann::json canonical;
  std::uint64_t hash = 0;

  std::vector<double> resolve_x_grid(double aspect) const;
};

/// Parses JSON text; throws ConfigError (with line and column on a syntax
/// error, or the list of every validation problem).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(const nlohmann::json& tree);
inline ExperimentConfig parse_config(const char* text) {
  return parse_config(std::string_view(text));
}
inline ExperimentConfig parse_config(const std::string& text) {
  return parse_config(std::string_view(text));
}

/// Applies `dotted.key=value` to a config tree. The value is read as JSON
/// when it parses as JSON and as a string otherwise.
void apply_override(nlohmann::json& tree, std::string_view assignment);

}  // namespace gramlimit

#endif  // GRAMLIMIT_CONFIG_HPP_
