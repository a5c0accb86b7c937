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

#ifndef GRAMLIMIT_SPECTRAL_HPP_
#define GRAMLIMIT_SPECTRAL_HPP_

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gramlimit/common.hpp"

namespace gramlimit {

enum class DensityFamily { kConstant, kAr1, kMa1, kFractional, kTabulated, kTruncated };

std::string_view to_string(DensityFamily family);
/// Parses "constant", "ar1", "ma1", "fractional", "tabulated", "truncated".
DensityFamily density_family_from_string(std::string_view name);

/// A set of positive measure on which f is constant. `measure` is the
/// Lebesgue measure of the set inside [0, pi]; by evenness the full set has
/// twice that.
struct Plateau {
  double level;
  double measure;
};

/// Even, nonnegative, integrable spectral density on [-pi, pi].
///
/// Covariances follow c_k = int_{-pi}^{pi} e^{ik t} f(t) dt with no 1/(2 pi)
/// prefactor, so the constant family sigma2 / (2 pi) has c_0 = sigma2.
/// Instances are immutable and cheap to copy (a truncated density shares its
/// parent).
class SpectralDensity {
 public:
  using Param = std::pair<std::string, double>;

  /// f = sigma2 / (2 pi): white noise of variance sigma2.
  static SpectralDensity constant(double sigma2 = 1.0);
  /// AR(1) X_t = phi X_{t-1} + e_t with Var(e) = sigma2, |phi| < 1.
  static SpectralDensity ar1(double phi, double sigma2 = 1.0);
  /// MA(1) X_t = e_t + theta e_{t-1} with Var(e) = sigma2.
  static SpectralDensity ma1(double theta, double sigma2 = 1.0);
  /// Long memory: f = sigma2 / (2 pi) |2 sin(l / 2)|^{-2d}, d in (0, 1/2).
  /// Integrable but not square integrable once d >= 1/4.
  static SpectralDensity fractional(double d, double sigma2 = 1.0);
  /// Piecewise-linear density through (lambda_i, value_i), lambda strictly
  /// increasing from 0 to pi; mirrored to [-pi, 0] by evenness.
  static SpectralDensity tabulated(std::vector<double> lambda,
                                   std::vector<double> values);
  /// Two-column whitespace separated text file (lambda, f); '#' comments.
  static SpectralDensity load_tabulated(const std::filesystem::path& path);

  DensityFamily family() const { return family_; }
  const std::vector<Param>& params() const { return params_; }
  /// Named parameter; throws DomainError if absent.
  double param(std::string_view name) const;

  /// Points in [-pi, pi] where f may diverge. Empty for bounded families.
  const std::vector<double>& singular_points() const { return singular_; }
  /// f ~ |l - s|^{-exponent} near each singular point (0 if bounded).
  double singular_exponent() const { return exponent_; }
  /// Points of (0, pi) where f is continuous but not smooth.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Plateau>& plateaus() const { return plateaus_; }
  /// sup f; +infinity for unbounded families.
  double supremum() const { return supremum_; }
  bool bounded() const { return std::isfinite(supremum_); }
  /// Source density of a truncated-of density, nullptr otherwise.
  const SpectralDensity* parent() const { return parent_.get(); }

  /// f(lambda). Returns +infinity at a singular point; throws DomainError if
  /// lambda lies outside [-pi, pi].
  double operator()(double lambda) const;
  /// f(lambda) without the range check.
  double eval_unchecked(double lambda) const;

  /// Canonical one-line description, e.g. "fractional(d=0.3,sigma2=1)".
  std::string describe() const;

 private:
  friend SpectralDensity truncate_density(const SpectralDensity& f, double b);

  SpectralDensity() = default;

  DensityFamily family_ = DensityFamily::kConstant;
  std::vector<Param> params_;
  std::vector<double> singular_;
  double exponent_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<Plateau> plateaus_;
  double supremum_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_lambda_;
  std::shared_ptr<const std::vector<double>> table_values_;
  std::shared_ptr<const SpectralDensity> parent_;
  // Cached parameters for the hot evaluation path.
  double a_ = 0.0;
  double b_ = 0.0;
};

/// f(lambda), with the +infinity marker at singular points.
double eval_density(const SpectralDensity& f, double lambda);

/// Lag-k autocovariance c_k = int e^{ik t} f(t) dt by singularity-graded
/// adaptive quadrature with relative tolerance `tol` (measured against c_0).
double covariance_from_density(const SpectralDensity& f, long k,
                               double tol = 1e-10);

/// c_0, ..., c_{max_lag} sharing one quadrature rule.
std::vector<double> covariances_from_density(const SpectralDensity& f,
                                             std::size_t max_lag,
                                             double tol = 1e-10);

/// Real coefficient sequence a_k, k in [-offset, size - 1 - offset], for the
/// moving average X_j = sum_k a_k e_{j-k}.
class LinearFilter {
 public:
  LinearFilter(std::vector<double> coeffs, std::size_t offset,
               double tail_bound = 0.0);

  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t offset() const { return offset_; }
  /// Certified bound on the sum of squares of the discarded coefficients.
  double tail_bound() const { return tail_bound_; }
  bool causal() const { return offset_ == 0; }
  long min_lag() const { return -static_cast<long>(offset_); }
  long max_lag() const {
    return static_cast<long>(coeffs_.size()) - 1 - static_cast<long>(offset_);
  }
  std::size_t size() const { return coeffs_.size(); }
  /// a_k, zero outside the stored support.
  double operator[](long k) const;
  /// sum a_k^2.
  double energy() const;
  /// Lag-h covariance of the filtered unit-variance white noise.
  double autocovariance(long h) const;
  std::string describe() const;

 private:
  std::vector<double> coeffs_;
  std::size_t offset_;
  double tail_bound_;
};

struct FilterOptions {
  /// Doubling stops with TailToleranceError beyond this half-width.
  std::size_t max_half_width = 8192;
  double quad_tol = 1e-10;
};

/// Symmetric square-root filter a_k = (2 pi)^{-1/2} int e^{ikx} sqrt(f(x)) dx,
/// truncated at the first K = 16, 32, ... with certified tail
/// c_0 - sum_{|k|<=K} a_k^2 <= tail_tol * c_0.
LinearFilter filter_from_density(const SpectralDensity& f,
                                 double tail_tol = 1e-6,
                                 const FilterOptions& options = {});

/// Causal (Wold) filter for the families with a closed-form innovation
/// representation: constant, ar1, ma1, fractional. Same tail certificate.
LinearFilter causal_filter(const SpectralDensity& f, double tail_tol = 1e-6,
                           std::size_t max_length = std::size_t{1} << 22);

/// Pointwise min(f, b). The result is bounded and has no singular points.
SpectralDensity truncate_density(const SpectralDensity& f, double b);

struct Atom {
  double location;
  double mass;
};

/// Law H of 2 pi f(U), U uniform on [-pi, pi], sampled on a grid. Atoms from
/// plateaus of f are listed separately and are included in `cdf`.
struct Pushforward {
  std::vector<double> x;
  std::vector<double> cdf;
  std::vector<Atom> atoms;
};

/// H(x) = (1 / 2 pi) |{l : 2 pi f(l) <= x}| on an increasing grid.
Pushforward h_pushforward(const SpectralDensity& f,
                          std::span<const double> x_grid);

/// eta_m = (sum_{k >= m} a_k^2)^{1/2} for a causal filter. Throws
/// DomainError for two-sided filters.
double regularity_profile(const LinearFilter& filter, std::size_t m);

}  // namespace gramlimit

#endif  // GRAMLIMIT_SPECTRAL_HPP_
