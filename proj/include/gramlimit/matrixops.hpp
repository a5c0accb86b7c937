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

#ifndef GRAMLIMIT_MATRIXOPS_HPP_
#define GRAMLIMIT_MATRIXOPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gramlimit/common.hpp"
#include "gramlimit/ensemble.hpp"

namespace gramlimit {

/// Dense symmetric matrix. The lower triangle of whatever it is built from
/// is authoritative and mirrored, so symmetry holds bit-for-bit.
template <typename Scalar>
class SymMatrixT {
 public:
  SymMatrixT() = default;

  template <typename Derived>
  static SymMatrixT from_lower(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw ShapeError("symmetric matrix must be square");
    SymMatrixT s;
    s.m_ = m.template triangularView<Eigen::Lower>();
    s.m_.template triangularView<Eigen::StrictlyUpper>() = s.m_.transpose();
    return s;
  }

  Eigen::Index order() const { return m_.rows(); }
  const MatrixX<Scalar>& dense() const { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  Scalar trace() const { return m_.trace(); }

 private:
  MatrixX<Scalar> m_;
};

using SymMatrix = SymMatrixT<double>;

/// Empirical spectral distribution: eigenvalues in nondecreasing order.
class Esd {
 public:
  Esd() = default;
  explicit Esd(std::vector<double> eigs);

  std::span<const double> eigs() const { return eigs_; }
  std::size_t size() const { return eigs_.size(); }
  double min() const { return eigs_.front(); }
  double max() const { return eigs_.back(); }
  /// #{k : lambda_k <= x} / n.
  double cdf(double x) const;

 private:
  std::vector<double> eigs_;
};

/// A(x) with (A)_ij = x_ij / sqrt(n) for j <= i, x listed row by row
/// (x_11, x_21, x_22, x_31, ...).
SymMatrix symmetric_from_lower(std::span<const double> x, std::size_t n);

/// B = X^T X / N for an N x p matrix X.
template <typename Derived>
SymMatrixT<typename Derived::Scalar> gram(const Eigen::MatrixBase<Derived>& x,
                                          std::size_t n_rows) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(x.rows()) != n_rows) {
    throw ShapeError("gram: N does not match the row count");
  }
  MatrixX<Scalar> b = MatrixX<Scalar>::Zero(x.cols(), x.cols());
  b.template selfadjointView<Eigen::Lower>().rankUpdate(
      x.transpose(), Scalar(1) / static_cast<Scalar>(n_rows));
  return SymMatrixT<Scalar>::from_lower(b);
}

inline SymMatrix gram(const DataMatrix& x) { return gram(x.entries(), x.rows()); }

/// N^{-1/2} [[0_{p,p}, X^T], [X, 0_{N,N}]], of order N + p.
template <typename Derived>
SymMatrixT<typename Derived::Scalar> symmetrize_gram(
    const Eigen::MatrixBase<Derived>& x, std::size_t n_rows) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(x.rows()) != n_rows) {
    throw ShapeError("symmetrize_gram: N does not match the row count");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n + p, n + p);
  m.bottomLeftCorner(n, p) = x / std::sqrt(static_cast<Scalar>(n_rows));
  return SymMatrixT<Scalar>::from_lower(m);
}

/// All eigenvalues, sorted. Throws SolverError if the iteration does not
/// converge and ResourceError above `max_order`.
Esd symmetric_eigenvalues(const SymMatrix& a, std::size_t max_order = 4096);

struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};
/// Eigenvalues with eigenvectors, for validating backward stability.
EigenDecomposition symmetric_eigendecomposition(const SymMatrix& a);

/// Step CDF F(x) = #{lambda_k <= x} / n.
double esd_cdf(const Esd& e, double x);

/// S(z) = (1/n) sum 1 / (lambda_k - z); requires Im z > 0.
Complex stieltjes_empirical(const Esd& e, Complex z);

/// Principal square root restricted to the upper half plane (Im > 0).
Complex upper_sqrt(Complex z);

struct StieltjesIdentity {
  Complex lhs;  // S_B(z) from the p x p Gram spectrum
  Complex rhs;  // z^{-1/2} (n / 2p) S_X(z^{1/2}) + (N - p) / (2 p z)
};

/// Evaluates both sides of the Gram/symmetrization relation independently.
StieltjesIdentity gram_stieltjes_identity(const RowMatrix& x, Complex z);

/// ESD of X^T X / N, the usual entry point for simulations.
Esd gram_esd(const DataMatrix& x);

}  // namespace gramlimit

#endif  // GRAMLIMIT_MATRIXOPS_HPP_
