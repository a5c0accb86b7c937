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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "gramlimit/matrixops.hpp"
#include "oracles.hpp"

namespace gramlimit {
namespace {

using oracle::char_poly_roots;
using oracle::random_matrix;
using oracle::random_symmetric;

TEST(SymmetricFromLower, PlacesAndScales) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const SymMatrix a = symmetric_from_lower(x, 2);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(a(0, 0), s);
  EXPECT_DOUBLE_EQ(a(1, 0), 2.0 * s);
  EXPECT_DOUBLE_EQ(a(0, 1), 2.0 * s);
  EXPECT_DOUBLE_EQ(a(1, 1), 3.0 * s);
  EXPECT_TRUE(symmetric_from_lower(std::vector<double>(6, 0.0), 3).dense().isZero(0.0));
  EXPECT_THROW(symmetric_from_lower(x, 3), ShapeError);
}

TEST(SymmetricFromLower, ExactlySymmetric) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(55);
  for (double& v : x) v = g(rng);
  const SymMatrix a = symmetric_from_lower(x, 10);
  EXPECT_EQ(a.dense(), a.dense().transpose());
}

TEST(Gram, SmallCases) {
  const Matrix eye = Matrix::Identity(4, 4);
  EXPECT_TRUE(gram(eye, 4).dense().isApprox(eye / 4.0, 1e-15));
  Matrix two(1, 1);
  two(0, 0) = 2.0;
  EXPECT_DOUBLE_EQ(gram(two, 1)(0, 0), 4.0);
  EXPECT_THROW(gram(eye, 3), ShapeError);
}

TEST(Gram, MatchesTripleLoop) {
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(rng, 5, 3);
  const SymMatrix b = gram(x, 5);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 5; ++k) s += x(k, i) * x(k, j);
      EXPECT_NEAR(b(i, j), s / 5.0, 1e-12);
    }
  }
}

TEST(Gram, PositiveSemidefinite) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix x = random_matrix(rng, 10 + t, 30);
    const Esd e = symmetric_eigenvalues(gram(x, static_cast<std::size_t>(x.rows())));
    EXPECT_GE(e.min(), -1e-10 * e.max());
  }
}

TEST(SymmetrizeGram, ZeroAndPairing) {
  EXPECT_TRUE(symmetrize_gram(Matrix::Zero(3, 2), 3).dense().isZero(0.0));
  std::mt19937_64 rng(4);
  const Matrix x = random_matrix(rng, 3, 2);
  const Esd sym = symmetric_eigenvalues(symmetrize_gram(x, 3));
  const Esd b = symmetric_eigenvalues(gram(x, 3));
  ASSERT_EQ(sym.size(), 5u);
  const auto s = sym.eigs();
  EXPECT_NEAR(s[2], 0.0, 1e-10);
  EXPECT_NEAR(s[3] * s[3], b.eigs()[0], 1e-10);
  EXPECT_NEAR(s[4] * s[4], b.eigs()[1], 1e-10);
  EXPECT_NEAR(s[0], -s[4], 1e-10);
  EXPECT_NEAR(s[1], -s[3], 1e-10);
}

TEST(SymmetrizeGram, SquaresReproduceBothGramSpectra) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 2 + t % 5, p = 1 + (t * 3) % 6;
    const Matrix x = random_matrix(rng, n, p);
    const Esd sym = symmetric_eigenvalues(symmetrize_gram(x, static_cast<std::size_t>(n)));
    std::vector<double> sq;
    for (double v : sym.eigs()) sq.push_back(v * v);
    std::sort(sq.begin(), sq.end());
    std::vector<double> both;
    const Esd small = symmetric_eigenvalues(gram(x, static_cast<std::size_t>(n)));
    const Esd large = symmetric_eigenvalues(
        SymMatrix::from_lower(Matrix(x * x.transpose() / static_cast<double>(n))));
    both.insert(both.end(), small.eigs().begin(), small.eigs().end());
    both.insert(both.end(), large.eigs().begin(), large.eigs().end());
    std::sort(both.begin(), both.end());
    ASSERT_EQ(sq.size(), both.size());
    for (std::size_t i = 0; i < sq.size(); ++i) EXPECT_NEAR(sq[i], both[i], 1e-8);
  }
}

TEST(Eigenvalues, SimpleMatrices) {
  const Esd e = symmetric_eigenvalues(SymMatrix::from_lower(Matrix::Identity(6, 6)));
  for (double v : e.eigs()) EXPECT_NEAR(v, 1.0, 1e-15);
  Matrix r(2, 2);
  r << 0.0, 1.0, 1.0, 0.0;
  const Esd f = symmetric_eigenvalues(SymMatrix::from_lower(r));
  EXPECT_NEAR(f.eigs()[0], -1.0, 1e-15);
  EXPECT_NEAR(f.eigs()[1], 1.0, 1e-15);
  EXPECT_THROW(symmetric_eigenvalues(SymMatrix::from_lower(Matrix::Identity(5, 5)), 4),
               ResourceError);
}

TEST(Eigenvalues, CharacteristicPolynomialOracle) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    const SymMatrix a = random_symmetric(rng, 5);
    const std::vector<double> roots = char_poly_roots(a.dense());
    const Esd e = symmetric_eigenvalues(a);
    ASSERT_EQ(roots.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e.eigs()[i], roots[i], 1e-8);
  }
}

TEST(Eigenvalues, TraceAndBackwardStability) {
  std::mt19937_64 rng(7);
  for (Eigen::Index n : {1, 2, 17, 64, 200, 512}) {
    const SymMatrix a = random_symmetric(rng, n);
    const Esd e = symmetric_eigenvalues(a);
    double s = 0.0;
    for (double v : e.eigs()) s += v;
    const double norm = a.dense().norm();
    EXPECT_NEAR(s, a.trace(), 1e-9 * norm) << n;
    EXPECT_TRUE(std::is_sorted(e.eigs().begin(), e.eigs().end()));
    if (n <= 200) {
      const EigenDecomposition d = symmetric_eigendecomposition(a);
      const Matrix rebuilt = d.vectors * d.values.asDiagonal() * d.vectors.transpose();
      EXPECT_LE((rebuilt - a.dense()).norm(), 1e-12 * static_cast<double>(n) * norm) << n;
    }
  }
}

TEST(EsdCdf, StepValues) {
  const Esd e({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(esd_cdf(e, 2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(esd_cdf(e, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(esd_cdf(e, 10.0), 1.0);
  EXPECT_DOUBLE_EQ(esd_cdf(Esd({1.0, 1.0}), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(Esd({3.0, 1.0, 2.0}).eigs()[0], 1.0);
}

TEST(StieltjesEmpirical, IdentityAndHerglotz) {
  const Complex z(0.3, 0.8);
  const Esd ones(std::vector<double>(7, 1.0));
  EXPECT_NEAR(std::abs(stieltjes_empirical(ones, z) - 1.0 / (1.0 - z)), 0.0, 1e-15);
  EXPECT_THROW(stieltjes_empirical(ones, Complex(1.0, 0.0)), DomainError);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> y(1e-6, 3.0);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> eig(1 + t % 13);
    for (double& v : eig) v = u(rng);
    EXPECT_GT(stieltjes_empirical(Esd(eig), Complex(u(rng), y(rng))).imag(), 0.0);
  }
}

TEST(StieltjesEmpirical, MatchesDirectInverse) {
  std::mt19937_64 rng(9);
  const SymMatrix a = random_symmetric(rng, 4);
  const Complex z(0.3, 0.7);
  const Eigen::MatrixXcd m = a.dense().cast<Complex>() - z * Eigen::MatrixXcd::Identity(4, 4);
  const Complex direct = m.inverse().trace() / 4.0;
  EXPECT_NEAR(std::abs(stieltjes_empirical(symmetric_eigenvalues(a), z) - direct), 0.0, 1e-12);
}

TEST(UpperSqrt, StaysInUpperHalfPlane) {
  for (const Complex z : {Complex(1.0, 1e-9), Complex(-1.0, 1e-9), Complex(0.0, 2.0),
                          Complex(-3.0, 0.5)}) {
    const Complex w = upper_sqrt(z);
    EXPECT_GT(w.imag(), 0.0);
    EXPECT_NEAR(std::abs(w * w - z), 0.0, 1e-14 * std::abs(z));
  }
}

TEST(GramStieltjesIdentity, DualPathAgreement) {
  std::mt19937_64 rng(10);
  {
    const RowMatrix x = random_matrix(rng, 3, 2);
    const auto r = gram_stieltjes_identity(x, Complex(0.0, 1.0));
    EXPECT_LE(std::abs(r.lhs - r.rhs), 1e-10);
  }
  {
    const RowMatrix x = random_matrix(rng, 4, 4);
    const auto r = gram_stieltjes_identity(x, Complex(0.0, 2.0));
    EXPECT_LE(std::abs(r.lhs - r.rhs), 1e-10);
  }
  const RowMatrix x = random_matrix(rng, 6, 4);
  for (double im : {0.5, 1.0, 2.0}) {
    for (double re : {-1.0, 0.0, 0.7, 2.5}) {
      const auto r = gram_stieltjes_identity(x, Complex(re, im));
      EXPECT_LE(std::abs(r.lhs - r.rhs), 1e-9);
    }
  }
  EXPECT_THROW(gram_stieltjes_identity(x, Complex(1.0, 0.0)), DomainError);
}

}  // namespace
}  // namespace gramlimit
