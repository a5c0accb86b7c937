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

#ifndef GRAMLIMIT_ENSEMBLE_HPP_
#define GRAMLIMIT_ENSEMBLE_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>

#include "gramlimit/common.hpp"
#include "gramlimit/spectral.hpp"

namespace gramlimit {

/// Per-row random engine. Row i of a matrix generated with `seed` always
/// draws from row_engine(seed, i), independent of scheduling.
using RowEngine = std::mt19937_64;
RowEngine row_engine(std::uint64_t seed, std::uint64_t row);

enum class InnovationKind { kGaussian, kRademacher, kUniform, kStudentT, kMartingaleSign };

/// Centered, unit-variance innovation sequence law.
class InnovationLaw {
 public:
  static InnovationLaw gaussian() { return InnovationLaw(InnovationKind::kGaussian); }
  static InnovationLaw rademacher() { return InnovationLaw(InnovationKind::kRademacher); }
  /// Uniform on [-sqrt 3, sqrt 3].
  static InnovationLaw uniform() { return InnovationLaw(InnovationKind::kUniform); }
  /// Student t scaled by sqrt((nu - 2) / nu); nu > 4.
  static InnovationLaw student_t(double nu);
  /// e_t = eta_t * v(eta_{t-1}) with eta i.i.d. signs and
  /// v(+1) = sqrt(3/2), v(-1) = sqrt(1/2): a martingale difference sequence
  /// with unit variance whose squares are serially dependent.
  static InnovationLaw martingale_sign() {
    return InnovationLaw(InnovationKind::kMartingaleSign);
  }
  /// Parses gaussian | rademacher | uniform | student_t | martingale_sign.
  static InnovationLaw parse(std::string_view name, double nu = 0.0);

  InnovationKind kind() const { return kind_; }
  double nu() const { return nu_; }
  std::string describe() const;

  /// Fills `out` with consecutive innovations of one stream.
  void fill(std::span<double> out, RowEngine& engine) const;

 private:
  explicit InnovationLaw(InnovationKind kind, double nu = 0.0) : kind_(kind), nu_(nu) {}
  InnovationKind kind_;
  double nu_;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Rows X_ij = sum_k a_k e_{i, j-k}.
struct FilterSource {
  LinearFilter filter;
  InnovationLaw innovation = InnovationLaw::gaussian();
};
/// Gaussian rows through the square-root filter of a density.
struct GaussianDensitySource {
  SpectralDensity density;
  double tail_tol = 1e-6;
  FilterOptions filter_options{};
};
/// Gaussian rows g_i Gamma_p^{1/2} with the exact Toeplitz covariance.
struct ToeplitzGaussianSource {
  SpectralDensity density;
};

using EnsembleSource =
    std::variant<FilterSource, GaussianDensitySource, ToeplitzGaussianSource>;

struct EnsembleConfig {
  std::size_t rows = 1;  // N
  std::size_t cols = 1;  // p
  EnsembleSource source;
  std::uint64_t seed = 0;

  /// c = p / N in lowest terms.
  Rational aspect_ratio() const;
  std::string describe_source() const;
  std::uint64_t source_hash() const;
  /// Throws DomainError on N == 0, p == 0 or an invalid innovation law.
  void validate() const;
};

/// N x p matrix of independent stationary rows. Immutable.
class DataMatrix {
 public:
  DataMatrix(RowMatrix entries, std::uint64_t seed, std::uint64_t source_hash);

  std::size_t rows() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries_.cols()); }
  const RowMatrix& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t source_hash() const { return source_hash_; }

 private:
  RowMatrix entries_;
  std::uint64_t seed_;
  std::uint64_t source_hash_;
};

struct GenerationOptions {
  /// Upper bound on N * (p + filter length), in doubles.
  std::size_t memory_budget = std::size_t{1} << 27;
  unsigned workers = 1;
};

DataMatrix generate_linear_rows(const EnsembleConfig& config,
                                const GenerationOptions& options = {});
DataMatrix generate_gaussian_rows(const EnsembleConfig& config,
                                  const GenerationOptions& options = {});

/// Gamma_p with (i, j) entry c_{|i-j|}.
Matrix toeplitz_matrix(const SpectralDensity& f, std::size_t p,
                       double tol = 1e-10);

/// Holds Gamma_p^{1/2} so that several seeds can share one decomposition.
class ToeplitzSampler {
 public:
  ToeplitzSampler(const SpectralDensity& f, std::size_t p);

  DataMatrix sample(std::size_t rows, std::uint64_t seed,
                    const GenerationOptions& options = {}) const;
  const Matrix& covariance() const { return gamma_; }
  const Matrix& root() const { return root_; }
  /// Smallest eigenvalue of Gamma_p before clamping.
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  Matrix gamma_;
  Matrix root_;
  double min_eigenvalue_ = 0.0;
  std::uint64_t source_hash_ = 0;
};

DataMatrix generate_toeplitz_gaussian_rows(const SpectralDensity& f,
                                           std::size_t rows, std::size_t cols,
                                           std::uint64_t seed,
                                           const GenerationOptions& options = {});

/// Dispatches on the source alternative.
DataMatrix generate(const EnsembleConfig& config,
                    const GenerationOptions& options = {});

}  // namespace gramlimit

#endif  // GRAMLIMIT_ENSEMBLE_HPP_
