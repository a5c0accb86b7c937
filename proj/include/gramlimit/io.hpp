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

#ifndef GRAMLIMIT_IO_HPP_
#define GRAMLIMIT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gramlimit/common.hpp"
#include "gramlimit/ensemble.hpp"
#include "gramlimit/limit.hpp"
#include "gramlimit/matrixops.hpp"

namespace gramlimit {

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Binary DataMatrix file: "GLDM", u32 version, u64 N, p, seed, source hash,
/// then N * p little-endian doubles in row-major order.
inline constexpr std::uint32_t kDataMatrixVersion = 1;
void write_data_matrix(const std::filesystem::path& path, const DataMatrix& x);
DataMatrix read_data_matrix(const std::filesystem::path& path);
void write_data_matrix_csv(const std::filesystem::path& path, const DataMatrix& x);

/// One eigenvalue per line.
void write_esd_text(const std::filesystem::path& path, const Esd& e);
/// Header "index,lambda".
void write_esd_csv(const std::filesystem::path& path, const Esd& e);
Esd read_esd_text(const std::filesystem::path& path);

/// Header "re_z,im_z,re_s,im_s".
void write_stieltjes_csv(const std::filesystem::path& path,
                         std::span<const Complex> z, std::span<const Complex> s);

/// Header "x,density,cdf".
void write_limit_csv(const std::filesystem::path& path, const LimitDistribution& l);
nlohmann::json limit_sidecar(const LimitDistribution& l, const SpectralDensity& f,
                             const SolverSettings& settings,
                             std::span<const double> eps_ladder);

struct DistanceRow {
  std::string metric;
  double lhs = 0.0;
  /// Bound or threshold; NaN when there is none.
  double rhs = 0.0;
  bool pass = true;
};
/// Header "metric,lhs,rhs,pass"; an absent rhs is written empty.
void write_distance_csv(const std::filesystem::path& path,
                        std::span<const DistanceRow> rows);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
std::string read_file(const std::filesystem::path& path);

}  // namespace gramlimit

#endif  // GRAMLIMIT_IO_HPP_
