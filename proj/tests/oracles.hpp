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

// Reference computations shared by the unit tests and the acceptance run.
// Each one is evaluated independently of the library code it checks.

#ifndef GRAMLIMIT_TESTS_ORACLES_HPP_
#define GRAMLIMIT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gramlimit/common.hpp"
#include "gramlimit/matrixops.hpp"

namespace gramlimit::oracle {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
  }
  return m;
}

inline SymMatrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  return SymMatrix::from_lower(random_matrix(rng, n, n));
}

/// Root with Im > 0 of z s2 S^2 + (z + s2 - c s2) S + 1 = 0, the companion
/// transform for constant f = s2 / (2 pi).
inline Complex mp_companion(double s2, double c, Complex z) {
  const Complex a = z * s2;
  const Complex b = z + s2 - c * s2;
  const Complex d = std::sqrt(b * b - 4.0 * a);
  const Complex r1 = (-b + d) / (2.0 * a);
  const Complex r2 = (-b - d) / (2.0 * a);
  return r1.imag() > 0.0 ? r1 : r2;
}

/// det(A - t I) by LU with partial pivoting in long double.
inline long double char_poly(const Matrix& a, double t) {
  const int n = static_cast<int>(a.rows());
  std::vector<long double> m(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i * n + j] = a(i, j) - (i == j ? t : 0.0);
  }
  long double det = 1.0L;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::fabs(m[i * n + k]) > std::fabs(m[piv * n + k])) piv = i;
    }
    if (m[piv * n + k] == 0.0L) return 0.0L;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
      det = -det;
    }
    det *= m[k * n + k];
    for (int i = k + 1; i < n; ++i) {
      const long double l = m[i * n + k] / m[k * n + k];
      for (int j = k; j < n; ++j) m[i * n + j] -= l * m[k * n + j];
    }
  }
  return det;
}

/// Roots of the characteristic polynomial: sign changes on a fine scan of
/// the Gershgorin interval, then bisection.
inline std::vector<double> char_poly_roots(const Matrix& a) {
  double radius = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) radius = std::max(radius, a.row(i).cwiseAbs().sum());
  const int steps = 200000;
  std::vector<double> roots;
  double lo = -radius - 1.0;
  long double flo = char_poly(a, lo);
  for (int s = 1; s <= steps; ++s) {
    const double hi = -radius - 1.0 + (2.0 * radius + 2.0) * s / steps;
    const long double fhi = char_poly(a, hi);
    if ((flo < 0) != (fhi < 0)) {
      double l = lo, h = hi;
      long double fl = flo;
      for (int it = 0; it < 200 && h - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
        const double mid = 0.5 * (l + h);
        const long double fm = char_poly(a, mid);
        if ((fm < 0) == (fl < 0)) {
          l = mid;
          fl = fm;
        } else {
          h = mid;
        }
      }
      roots.push_back(0.5 * (l + h));
    }
    lo = hi;
    flo = fhi;
  }
  return roots;
}

}  // namespace gramlimit::oracle

#endif  // GRAMLIMIT_TESTS_ORACLES_HPP_
