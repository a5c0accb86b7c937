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

#ifndef GRAMLIMIT_METRICS_HPP_
#define GRAMLIMIT_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "gramlimit/common.hpp"
#include "gramlimit/matrixops.hpp"

namespace gramlimit {

/// Distribution function given by knots t_0 < t_1 < ... with left limits
/// F(t_i-) and values F(t_i); F is linear between F(t_i) and F(t_{i+1}-),
/// zero before t_0 and constant after the last knot. Step CDFs (ESDs) are
/// the special case F(t_{i+1}-) = F(t_i); grid CDFs are continuous between
/// nodes. A final value below 1 is read as mass escaping to +infinity.
class StepCdf {
 public:
  /// Mass 1/n at each eigenvalue (ties merged).
  static StepCdf from_esd(const Esd& e);
  /// Atoms at `points` with the given weights (must sum to 1 within 1e-12).
  static StepCdf from_points(std::vector<double> points, std::vector<double> weights);
  /// Piecewise-linear through (x_i, F_i); F jumps from 0 to F_0 at x_0.
  static StepCdf from_grid(std::span<const double> x, std::span<const double> values);

  double operator()(double x) const;
  double left_limit(double x) const;
  std::span<const double> knots() const { return t_; }
  double total_mass() const { return right_.empty() ? 0.0 : right_.back(); }
  /// Nondecreasing with values in [0, 1].
  bool valid() const;

 private:
  std::vector<double> t_;
  std::vector<double> left_;
  std::vector<double> right_;
};

/// Levy distance inf{eps : F(x - eps) - eps <= G(x) <= F(x + eps) + eps},
/// by bisection with the corridor checked exactly at every knot.
double levy_distance(const StepCdf& f, const StepCdf& g);

/// sup_x |F(x) - G(x)|, including left limits at jumps.
double kolmogorov_distance(const StepCdf& f, const StepCdf& g);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
};

/// lhs = |S_A(z) - S_B(z)|, rhs = |Tr(A - B)|^{1/2} / (y^2 sqrt(n)), y = Im z.
/// The right-hand side is the trace form as stated for the comparison
/// inequality; see stieltjes_diff_frobenius_bound for the resolvent bound.
BoundCheck stieltjes_diff_bound(const SymMatrix& a, const SymMatrix& b, Complex z);

/// Same lhs with rhs = (Tr (A - B)^2)^{1/2} / (y^2 sqrt(n)), which follows
/// from S_A - S_B = n^{-1} Tr(R_A (B - A) R_B). Diagnostic only.
BoundCheck stieltjes_diff_frobenius_bound(const SymMatrix& a, const SymMatrix& b,
                                          Complex z);

/// For n x p matrices: lhs = d^2(F_{AA^T}, F_{BB^T}),
/// rhs = (sqrt 2 / n) [Tr(AA^T + BB^T) Tr((A - B)(A - B)^T)]^{1/2}.
BoundCheck levy_gram_bound(const Matrix& a, const Matrix& b);

/// L(A) = n^{-2} sum_{j <= i} x_ij^2 1{|x_ij| > A} over one realization,
/// with x listed as in symmetric_from_lower.
double lindeberg_statistic(std::span<const double> lower_entries, double a);

}  // namespace gramlimit

#endif  // GRAMLIMIT_METRICS_HPP_
