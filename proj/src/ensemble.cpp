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

#include "gramlimit/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "gramlimit/parallel.hpp"

namespace gramlimit {

RowEngine row_engine(std::uint64_t seed, std::uint64_t row) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(row),
                    static_cast<std::uint32_t>(row >> 32),
                    0x9e3779b9u};
  return RowEngine(seq);
}

InnovationLaw InnovationLaw::student_t(double nu) {
  if (!(nu > 4.0) || !std::isfinite(nu)) {
    throw DomainError("student_t innovations need nu > 4");
  }
  return InnovationLaw(InnovationKind::kStudentT, nu);
}

InnovationLaw InnovationLaw::parse(std::string_view name, double nu) {
  if (name == "gaussian") return gaussian();
  if (name == "rademacher") return rademacher();
  if (name == "uniform") return uniform();
  if (name == "student_t") return student_t(nu);
  if (name == "martingale_sign") return martingale_sign();
  throw DomainError("unknown innovation law '" + std::string(name) + "'");
}

std::string InnovationLaw::describe() const {
  switch (kind_) {
    case InnovationKind::kGaussian: return "gaussian";
    case InnovationKind::kRademacher: return "rademacher";
    case InnovationKind::kUniform: return "uniform";
    case InnovationKind::kStudentT: return "student_t(nu=" + std::to_string(nu_) + ")";
    case InnovationKind::kMartingaleSign: return "martingale_sign";
  }
  return "unknown";
}

void InnovationLaw::fill(std::span<double> out, RowEngine& engine) const {
  auto sign = [&engine] { return (engine() >> 63) ? 1.0 : -1.0; };
  switch (kind_) {
    case InnovationKind::kGaussian: {
      std::normal_distribution<double> normal;
      for (double& v : out) v = normal(engine);
      return;
    }
    case InnovationKind::kRademacher:
      for (double& v : out) v = sign();
      return;
    case InnovationKind::kUniform: {
      const double h = std::sqrt(3.0);
      std::uniform_real_distribution<double> uniform(-h, h);
      for (double& v : out) v = uniform(engine);
      return;
    }
    case InnovationKind::kStudentT: {
      std::student_t_distribution<double> t(nu_);
      const double scale = std::sqrt((nu_ - 2.0) / nu_);
      for (double& v : out) v = scale * t(engine);
      return;
    }
    case InnovationKind::kMartingaleSign: {
      const double up = std::sqrt(1.5);
      const double down = std::sqrt(0.5);
      double previous = sign();
      for (double& v : out) {
        const double eta = sign();
        v = eta * (previous > 0.0 ? up : down);
        previous = eta;
      }
      return;
    }
  }
}

std::string Rational::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational EnsembleConfig::aspect_ratio() const {
  const auto p = static_cast<std::int64_t>(cols);
  const auto n = static_cast<std::int64_t>(rows);
  const std::int64_t g = std::gcd(p, n);
  return {p / g, n / g};
}

std::string EnsembleConfig::describe_source() const {
  return std::visit(
      [](const auto& src) -> std::string {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, FilterSource>) {
          return "linear[" + src.filter.describe() + "," + src.innovation.describe() + "]";
        } else if constexpr (std::is_same_v<T, GaussianDensitySource>) {
          return "gaussian-from-density[" + src.density.describe() +
                 ",tail_tol=" + std::to_string(src.tail_tol) + "]";
        } else {
          return "toeplitz-gaussian[" + src.density.describe() + "]";
        }
      },
      source);
}

std::uint64_t EnsembleConfig::source_hash() const {
  return fnv1a64(describe_source());
}

void EnsembleConfig::validate() const {
  if (rows == 0 || cols == 0) {
    throw DomainError("ensemble needs N >= 1 and p >= 1");
  }
}

DataMatrix::DataMatrix(RowMatrix entries, std::uint64_t seed,
                       std::uint64_t source_hash)
    : entries_(std::move(entries)), seed_(seed), source_hash_(source_hash) {
  if (!entries_.allFinite()) throw DomainError("data matrix has non-finite entries");
}

namespace {

std::size_t fft_size(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// One row of the moving average: out[j] = sum_idx a[idx] e[j + size - 1 - idx].
class RowFilter {
 public:
  RowFilter(const LinearFilter& filter, std::size_t cols)
      : coeffs_(filter.coeffs().begin(), filter.coeffs().end()), cols_(cols) {
    const std::size_t taps = coeffs_.size();
    n_ = fft_size(cols_ + 2 * taps);
    const double direct = static_cast<double>(taps) * static_cast<double>(cols_);
    const double fast = 40.0 * static_cast<double>(n_) * std::log2(static_cast<double>(n_));
    use_fft_ = direct > fast;
    if (use_fft_) {
      std::vector<double> padded(n_, 0.0);
      std::copy(coeffs_.begin(), coeffs_.end(), padded.begin());
      Eigen::FFT<double> fft;
      fft.fwd(spectrum_, padded);
    }
  }

  std::size_t innovations() const { return cols_ + coeffs_.size() - 1; }

  void apply(std::span<const double> e, std::span<double> out) const {
    const std::size_t taps = coeffs_.size();
    if (!use_fft_) {
      for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        const std::size_t base = j + taps - 1;
        for (std::size_t idx = 0; idx < taps; ++idx) s += coeffs_[idx] * e[base - idx];
        out[j] = s;
      }
      return;
    }
    std::vector<double> padded(n_, 0.0);
    std::copy(e.begin(), e.end(), padded.begin());
    Eigen::FFT<double> fft;
    std::vector<Complex> freq;
    fft.fwd(freq, padded);
    for (std::size_t k = 0; k < freq.size(); ++k) freq[k] *= spectrum_[k];
    std::vector<double> full;
    fft.inv(full, freq);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = full[j + taps - 1];
  }

 private:
  std::vector<double> coeffs_;
  std::size_t cols_;
  bool use_fft_ = false;
  std::size_t n_ = 0;
  std::vector<Complex> spectrum_;
};

DataMatrix filtered_rows(const LinearFilter& filter, const InnovationLaw& law,
                         std::size_t rows, std::size_t cols, std::uint64_t seed,
                         std::uint64_t source_hash,
                         const GenerationOptions& options) {
  const double footprint = static_cast<double>(rows) *
                           static_cast<double>(cols + filter.size());
  if (footprint > static_cast<double>(options.memory_budget)) {
    throw ResourceError("N * (p + filter length) = " +
                        std::to_string(static_cast<long long>(footprint)) +
                        " exceeds the memory budget of " +
                        std::to_string(options.memory_budget) + " values");
  }
  const RowFilter row_filter(filter, cols);
  RowMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  parallel_for(rows, options.workers, [&](std::size_t i) {
    RowEngine engine = row_engine(seed, i);
    std::vector<double> e(row_filter.innovations());
    law.fill(e, engine);
    row_filter.apply(e, std::span<double>(x.row(static_cast<Eigen::Index>(i)).data(), cols));
  });
  return DataMatrix(std::move(x), seed, source_hash);
}

}  // namespace

DataMatrix generate_linear_rows(const EnsembleConfig& config,
                                const GenerationOptions& options) {
  config.validate();
  const auto* src = std::get_if<FilterSource>(&config.source);
  if (!src) throw DomainError("generate_linear_rows needs a filter source");
  return filtered_rows(src->filter, src->innovation, config.rows, config.cols,
                       config.seed, config.source_hash(), options);
}

DataMatrix generate_gaussian_rows(const EnsembleConfig& config,
                                  const GenerationOptions& options) {
  config.validate();
  const auto* src = std::get_if<GaussianDensitySource>(&config.source);
  if (!src) throw DomainError("generate_gaussian_rows needs a density source");
  const LinearFilter filter =
      filter_from_density(src->density, src->tail_tol, src->filter_options);
  return filtered_rows(filter, InnovationLaw::gaussian(), config.rows,
                       config.cols, config.seed, config.source_hash(), options);
}

Matrix toeplitz_matrix(const SpectralDensity& f, std::size_t p, double tol) {
  if (p == 0) throw DomainError("Toeplitz order must be >= 1");
  const std::vector<double> c = covariances_from_density(f, p - 1, tol);
  const auto n = static_cast<Eigen::Index>(p);
  Matrix gamma(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gamma(i, j) = c[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return gamma;
}

ToeplitzSampler::ToeplitzSampler(const SpectralDensity& f, std::size_t p)
    : gamma_(toeplitz_matrix(f, p)) {
  const EnsembleConfig cfg{1, p, ToeplitzGaussianSource{f}, 0};
  source_hash_ = cfg.source_hash();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gamma_);
  if (eig.info() != Eigen::Success) {
    throw SolverError("eigendecomposition of Gamma_p failed");
  }
  const double c0 = gamma_(0, 0);
  Vector lambda = eig.eigenvalues();
  min_eigenvalue_ = lambda.minCoeff();
  if (min_eigenvalue_ < -1e-8 * c0) {
    throw DomainError("Gamma_p is not positive semidefinite: min eigenvalue " +
                      std::to_string(min_eigenvalue_));
  }
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  root_ = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  root_ = 0.5 * (root_ + root_.transpose()).eval();
}

DataMatrix ToeplitzSampler::sample(std::size_t rows, std::uint64_t seed,
                                   const GenerationOptions& options) const {
  if (rows == 0) throw DomainError("ensemble needs N >= 1");
  const Eigen::Index p = gamma_.rows();
  const double footprint = static_cast<double>(rows) * static_cast<double>(p);
  if (footprint > static_cast<double>(options.memory_budget)) {
    throw ResourceError("N * p exceeds the memory budget");
  }
  RowMatrix g(static_cast<Eigen::Index>(rows), p);
  const InnovationLaw normal = InnovationLaw::gaussian();
  parallel_for(rows, options.workers, [&](std::size_t i) {
    RowEngine engine = row_engine(seed, i);
    normal.fill(std::span<double>(g.row(static_cast<Eigen::Index>(i)).data(),
                                  static_cast<std::size_t>(p)),
                engine);
  });
  RowMatrix x = g * root_;
  return DataMatrix(std::move(x), seed, source_hash_);
}

DataMatrix generate_toeplitz_gaussian_rows(const SpectralDensity& f,
                                           std::size_t rows, std::size_t cols,
                                           std::uint64_t seed,
                                           const GenerationOptions& options) {
  if (rows == 0 || cols == 0) throw DomainError("ensemble needs N >= 1 and p >= 1");
  return ToeplitzSampler(f, cols).sample(rows, seed, options);
}

DataMatrix generate(const EnsembleConfig& config,
                    const GenerationOptions& options) {
  return std::visit(
      [&](const auto& src) -> DataMatrix {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, FilterSource>) {
          return generate_linear_rows(config, options);
        } else if constexpr (std::is_same_v<T, GaussianDensitySource>) {
          return generate_gaussian_rows(config, options);
        } else {
          config.validate();
          return generate_toeplitz_gaussian_rows(src.density, config.rows,
                                                 config.cols, config.seed, options);
        }
      },
      config.source);
}

}  // namespace gramlimit
