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

#include "gramlimit/matrixops.hpp"

#include <Eigen/Eigenvalues>

namespace gramlimit {

Esd::Esd(std::vector<double> eigs) : eigs_(std::move(eigs)) {
  std::sort(eigs_.begin(), eigs_.end());
}

double Esd::cdf(double x) const {
  if (eigs_.empty()) return 0.0;
  const auto it = std::upper_bound(eigs_.begin(), eigs_.end(), x);
  return static_cast<double>(it - eigs_.begin()) /
         static_cast<double>(eigs_.size());
}

SymMatrix symmetric_from_lower(std::span<const double> x, std::size_t n) {
  if (x.size() != n * (n + 1) / 2) {
    throw ShapeError("symmetric_from_lower: expected " +
                     std::to_string(n * (n + 1) / 2) + " entries, got " +
                     std::to_string(x.size()));
  }
  const auto order = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix m = Matrix::Zero(order, order);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < order; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = scale * x[k++];
  }
  return SymMatrix::from_lower(m);
}

Esd symmetric_eigenvalues(const SymMatrix& a, std::size_t max_order) {
  const auto n = static_cast<std::size_t>(a.order());
  if (n == 0) throw ShapeError("eigenvalues of an empty matrix");
  if (n > max_order) {
    throw ResourceError("matrix order " + std::to_string(n) +
                        " exceeds the configured limit " + std::to_string(max_order));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw SolverError("symmetric eigensolver did not converge (order " +
                      std::to_string(n) + ")");
  }
  const Vector& v = solver.eigenvalues();
  return Esd(std::vector<double>(v.data(), v.data() + v.size()));
}

EigenDecomposition symmetric_eigendecomposition(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.dense());
  if (solver.info() != Eigen::Success) {
    throw SolverError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double esd_cdf(const Esd& e, double x) { return e.cdf(x); }

Complex stieltjes_empirical(const Esd& e, Complex z) {
  if (!(z.imag() > 0.0)) {
    throw DomainError("Stieltjes transform needs Im z > 0");
  }
  Complex s = 0.0;
  for (double lambda : e.eigs()) s += 1.0 / (lambda - z);
  return s / static_cast<double>(e.size());
}

Complex upper_sqrt(Complex z) {
  Complex w = std::sqrt(z);
  if (w.imag() < 0.0) w = -w;
  return w;
}

StieltjesIdentity gram_stieltjes_identity(const RowMatrix& x, Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("identity needs Im z > 0");
  const auto big_n = static_cast<double>(x.rows());
  const auto p = static_cast<double>(x.cols());
  const std::size_t rows = static_cast<std::size_t>(x.rows());
  const Esd gram_spectrum = symmetric_eigenvalues(gram(x, rows));
  const Esd sym_spectrum = symmetric_eigenvalues(symmetrize_gram(x, rows));
  const Complex w = upper_sqrt(z);
  StieltjesIdentity out;
  out.lhs = stieltjes_empirical(gram_spectrum, z);
  out.rhs = (big_n + p) / (2.0 * p) * stieltjes_empirical(sym_spectrum, w) / w +
            (big_n - p) / (2.0 * p * z);
  return out;
}

Esd gram_esd(const DataMatrix& x) { return symmetric_eigenvalues(gram(x)); }

}  // namespace gramlimit
