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

#ifndef GRAMLIMIT_LIMIT_HPP_
#define GRAMLIMIT_LIMIT_HPP_

#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gramlimit/common.hpp"
#include "gramlimit/metrics.hpp"
#include "gramlimit/spectral.hpp"

namespace gramlimit {

struct SolverSettings {
  /// Accept when |z + 1/S_ - c J(S_)| <= tol * max(1, |z|).
  double tol = 1e-12;
  int max_iter = 10000;
  /// Weight of the new iterate in the fixed-point fallback step.
  double damping = 0.5;
  /// Relative tolerance of the lambda integral (checked against a rule with
  /// twice the panels at the converged point).
  double quad_tol = 1e-10;
  /// Re-solve from S_ = i and fail unless both starts agree to 1e-9.
  bool probe_uniqueness = false;

  /// Throws DomainError listing every invalid field.
  void validate() const;
};

struct LimitSolution {
  Complex s_under;  // companion transform S_ = -(1 - c)/z + c S
  Complex s;        // Stieltjes transform of the limit F
  double residual = 0.0;
  /// Residual recomputed with the finer quadrature rule.
  double certified_residual = 0.0;
  int iterations = 0;
  /// Quadrature level the solve finished on; a warm-start hint.
  std::size_t level = 0;
};

/// S_ = -(1 - c)/z + c S.
Complex companion(Complex s, double c, Complex z);
/// S = (S_ + (1 - c)/z) / c.
Complex companion_inverse(Complex s_under, double c, Complex z);

/// J(S_) = (1 / 2 pi) int dl / (S_ + (2 pi f(l))^{-1}) on a ladder of
/// singularity-graded rules (level m uses 16 * 2^m panels on [0, pi]).
/// Where f is infinite the integrand takes its limit 1/S_. Levels are built
/// on first use; the object is safe to share between threads.
class DensityEquation {
 public:
  static constexpr std::size_t kMaxLevel = 14;

  explicit DensityEquation(const SpectralDensity& f);
  ~DensityEquation();
  DensityEquation(const DensityEquation&) = delete;
  DensityEquation& operator=(const DensityEquation&) = delete;

  /// J and dJ/dS_ at the given level.
  std::pair<Complex, Complex> moment(Complex s_under, std::size_t level) const;
  const SpectralDensity& density() const { return f_; }

 private:
  struct Level;
  const Level& level(std::size_t m) const;

  SpectralDensity f_;
  mutable std::array<std::once_flag, kMaxLevel + 1> once_;
  mutable std::array<std::unique_ptr<Level>, kMaxLevel + 1> levels_;
};

struct SolveStart {
  std::optional<Complex> s_under;  // default -1/z
  std::size_t level = 0;
};

LimitSolution solve_limit(const DensityEquation& eq, double c, Complex z,
                          const SolverSettings& settings,
                          const SolveStart& start = {});

/// Solves z = -1/S_ + (c / 2 pi) int dl / (S_ + (2 pi f(l))^{-1}).
LimitSolution solve_limit_density(const SpectralDensity& f, double c, Complex z,
                                  const SolverSettings& settings = {});

/// Population law H as atoms plus mass spread uniformly over grid cells.
/// cell_mass[0] sits at x[0]; cell_mass[i] is uniform on (x[i-1], x[i]];
/// tail_mass lies beyond the grid and is integrated as if at +infinity.
struct HMeasure {
  std::vector<Atom> atoms;
  std::vector<double> x;
  std::vector<double> cell_mass;
  double tail_mass = 0.0;
};

HMeasure h_measure(const Pushforward& h);
HMeasure point_mass(double location);

/// Solves z = -1/S_ + c int x / (1 + x S_) dH(x).
LimitSolution solve_limit_H(const HMeasure& h, double c, Complex z,
                            const SolverSettings& settings = {},
                            const SolveStart& start = {});
LimitSolution solve_limit_H(const Pushforward& h, double c, Complex z,
                            const SolverSettings& settings = {});

struct LimitDistribution {
  std::vector<double> x;
  std::vector<double> density;
  std::vector<double> cdf;
  double atom0 = 0.0;
  double c = 1.0;
  /// Points where the density crosses the edge threshold.
  std::vector<double> edges;
  /// Grid points whose two finest eps estimates differ by more than 10%.
  std::vector<double> unstable_x;
  double max_residual = 0.0;
  double max_certified_residual = 0.0;
  std::size_t solves = 0;

  double continuous_mass() const;
  StepCdf to_cdf() const;
};

struct InversionOptions {
  double edge_threshold = 1e-4;
  /// Each edge cell is split into this many sub-cells.
  int edge_refine = 4;
  /// Below this x the eps ladder is scaled by x / ladder_scale_below so the
  /// smoothing stays small relative to x (hard edge at c = 1).
  double ladder_scale_below = 0.5;
  double instability = 0.1;
};

inline const std::vector<double>& default_eps_ladder() {
  static const std::vector<double> ladder{0.05, 0.02, 0.01, 0.005};
  return ladder;
}

/// Density by Richardson extrapolation (linear in eps, two finest rungs) of
/// Im S(x + i eps) / pi, continuous part only; atom0 = max(0, 1 - 1/c).
LimitDistribution invert_to_distribution(const SpectralDensity& f, double c,
                                         std::span<const double> x_grid,
                                         std::span<const double> eps_ladder,
                                         const SolverSettings& settings = {},
                                         const InversionOptions& options = {});

/// Grid suited to the limit of (f, c): geometric near 0 when c == 1,
/// uniform across the estimated bulk, geometric into the upper tail.
std::vector<double> auto_x_grid(const SpectralDensity& f, double c,
                                std::size_t bulk_points = 600);

struct TruncationLadder {
  std::vector<double> b;
  std::vector<LimitDistribution> limits;
  /// Levy distance between consecutive rungs (size b.size() - 1).
  std::vector<double> gaps;
  /// int f_b over [-pi, pi] for each rung.
  std::vector<double> masses;
};

TruncationLadder truncation_ladder(const SpectralDensity& f, double c,
                                   std::span<const double> b_list,
                                   std::span<const double> x_grid,
                                   const SolverSettings& settings = {},
                                   std::span<const double> eps_ladder = default_eps_ladder());

}  // namespace gramlimit

#endif  // GRAMLIMIT_LIMIT_HPP_
