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

#include "gramlimit/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gramlimit {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'D', 'M'};

template <typename T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error("data matrix file is truncated");
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  pos += sizeof(T);
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_data_matrix(const std::filesystem::path& path, const DataMatrix& x) {
  std::string out;
  const std::size_t n = x.rows() * x.cols();
  out.reserve(40 + 8 * n);
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kDataMatrixVersion);
  put_le<std::uint64_t>(out, x.rows());
  put_le<std::uint64_t>(out, x.cols());
  put_le<std::uint64_t>(out, x.seed());
  put_le<std::uint64_t>(out, x.source_hash());
  const double* data = x.entries().data();
  for (std::size_t i = 0; i < n; ++i) put_le<double>(out, data[i]);
  write_file_atomic(path, out);
}

DataMatrix read_data_matrix(const std::filesystem::path& path) {
  const std::string in = read_file(path);
  if (in.size() < 4 || std::memcmp(in.data(), kMagic, 4) != 0) {
    throw Error(path.string() + " is not a data matrix file");
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(in, pos);
  if (version != kDataMatrixVersion) {
    throw Error("unsupported data matrix version " + std::to_string(version));
  }
  const auto rows = get_le<std::uint64_t>(in, pos);
  const auto cols = get_le<std::uint64_t>(in, pos);
  const auto seed = get_le<std::uint64_t>(in, pos);
  const auto hash = get_le<std::uint64_t>(in, pos);
  if (rows == 0 || cols == 0 || (in.size() - pos) / 8 != rows * cols ||
      (in.size() - pos) % 8 != 0) {
    throw Error(path.string() + ": payload does not match the header shape");
  }
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  double* data = m.data();
  for (std::size_t i = 0; i < rows * cols; ++i) data[i] = get_le<double>(in, pos);
  return DataMatrix(std::move(m), seed, hash);
}

void write_data_matrix_csv(const std::filesystem::path& path, const DataMatrix& x) {
  std::string out;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(x(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_esd_text(const std::filesystem::path& path, const Esd& e) {
  std::string out;
  for (double v : e.eigs()) {
    out += format_double(v);
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_esd_csv(const std::filesystem::path& path, const Esd& e) {
  std::string out = "index,lambda\n";
  const auto eigs = e.eigs();
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    out += std::to_string(i) + "," + format_double(eigs[i]) + "\n";
  }
  write_file_atomic(path, out);
}

Esd read_esd_text(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(std::stod(line));
  }
  return Esd(std::move(values));
}

void write_stieltjes_csv(const std::filesystem::path& path,
                         std::span<const Complex> z, std::span<const Complex> s) {
  if (z.size() != s.size()) throw ShapeError("z and S lists differ in length");
  std::string out = "re_z,im_z,re_s,im_s\n";
  for (std::size_t i = 0; i < z.size(); ++i) {
    out += format_double(z[i].real()) + "," + format_double(z[i].imag()) + "," +
           format_double(s[i].real()) + "," + format_double(s[i].imag()) + "\n";
  }
  write_file_atomic(path, out);
}

void write_limit_csv(const std::filesystem::path& path, const LimitDistribution& l) {
  std::string out = "x,density,cdf\n";
  for (std::size_t i = 0; i < l.x.size(); ++i) {
    out += format_double(l.x[i]) + "," + format_double(l.density[i]) + "," +
           format_double(l.cdf[i]) + "\n";
  }
  write_file_atomic(path, out);
}

nlohmann::json limit_sidecar(const LimitDistribution& l, const SpectralDensity& f,
                             const SolverSettings& settings,
                             std::span<const double> eps_ladder) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, value] : f.params()) params[name] = value;
  return {
      {"c", l.c},
      {"family", std::string(to_string(f.family()))},
      {"density", f.describe()},
      {"params", params},
      {"atom0", l.atom0},
      {"continuous_mass", l.continuous_mass()},
      {"edges", l.edges},
      {"tolerances",
       {{"tol", settings.tol},
        {"quad_tol", settings.quad_tol},
        {"damping", settings.damping},
        {"max_iter", settings.max_iter},
        {"eps_ladder", std::vector<double>(eps_ladder.begin(), eps_ladder.end())}}},
      {"residuals",
       {{"max", l.max_residual},
        {"max_certified", l.max_certified_residual},
        {"solves", l.solves}}},
      {"unstable_points", l.unstable_x.size()},
  };
}

void write_distance_csv(const std::filesystem::path& path,
                        std::span<const DistanceRow> rows) {
  std::string out = "metric,lhs,rhs,pass\n";
  for (const DistanceRow& r : rows) {
    out += r.metric + "," + format_double(r.lhs) + "," +
           (std::isnan(r.rhs) ? std::string() : format_double(r.rhs)) + "," +
           (r.pass ? "pass" : "fail") + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace gramlimit
