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
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gramlimit/matrixops.hpp"
#include "gramlimit/metrics.hpp"

namespace gramlimit {
namespace {

StepCdf point_mass(double t) { return StepCdf::from_points({t}, {1.0}); }

// Step CDF with `n` unit-weight atoms on the lattice k / 1000, k in [0, 1000].
StepCdf lattice_cdf(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> k(0, 1000);
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (double& p : pts) p = k(rng) / 1000.0;
  return StepCdf::from_esd(Esd(pts));
}

double brute_kolmogorov(const StepCdf& f, const StepCdf& g) {
  double worst = 0.0;
  const int m = 1000000;
  for (int i = 0; i <= m; ++i) {
    const double x = -0.1 + 1.2 * i / m;
    worst = std::max(worst, std::abs(f(x) - g(x)));
  }
  return worst;
}

// Smallest eps (to 1e-6) for which the corridor holds on a dense grid.
double brute_levy(const StepCdf& f, const StepCdf& g) {
  const auto inside = [&](double eps) {
    for (int i = 0; i <= 20000; ++i) {
      const double x = -1.2 + 3.4 * i / 20000.0;
      if (f(x - eps) - eps > g(x) + 1e-12 || g(x) > f(x + eps) + eps + 1e-12) return false;
      if (g(x - eps) - eps > f(x) + 1e-12 || f(x) > g(x + eps) + eps + 1e-12) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

TEST(Levy, IdentityAndPointMasses) {
  std::mt19937_64 rng(1);
  const StepCdf f = lattice_cdf(rng, 30);
  EXPECT_NEAR(levy_distance(f, f), 0.0, 1e-9);
  EXPECT_NEAR(levy_distance(point_mass(0.0), point_mass(0.3)), 0.3, 1e-9);
  EXPECT_NEAR(levy_distance(point_mass(0.0), point_mass(1.7)), 1.0, 1e-9);
}

TEST(Levy, MatchesCorridorDefinition) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const StepCdf f = lattice_cdf(rng, 5 + t);
    const StepCdf g = lattice_cdf(rng, 8 + 2 * t);
    EXPECT_NEAR(levy_distance(f, g), brute_levy(f, g), 2e-3) << t;
  }
}

TEST(Levy, GridCdfAgainstStepCdf) {
  // Uniform law on [0, 1] as a two-node grid CDF vs the ESD of a lattice.
  const std::vector<double> x{0.0, 1.0}, v{0.0, 1.0};
  const StepCdf u = StepCdf::from_grid(x, v);
  std::vector<double> pts;
  for (int i = 1; i <= 100; ++i) pts.push_back(i / 100.0);
  const StepCdf e = StepCdf::from_esd(Esd(pts));
  EXPECT_NEAR(kolmogorov_distance(u, e), 0.01, 1e-12);
  EXPECT_LE(levy_distance(u, e), 0.01 + 1e-9);
  EXPECT_NEAR(levy_distance(u, e), brute_levy(u, e), 2e-3);
}

TEST(Metrics, AxiomsAndDomination) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const StepCdf f = lattice_cdf(rng, 1 + t % 17);
    const StepCdf g = lattice_cdf(rng, 1 + t % 11);
    const StepCdf h = lattice_cdf(rng, 1 + t % 7);
    const double fg = levy_distance(f, g);
    EXPECT_GE(fg, 0.0);
    EXPECT_NEAR(fg, levy_distance(g, f), 1e-9);
    EXPECT_LE(fg, levy_distance(f, h) + levy_distance(h, g) + 1e-9);
    const double kfg = kolmogorov_distance(f, g);
    EXPECT_NEAR(kfg, kolmogorov_distance(g, f), 1e-15);
    EXPECT_LE(kfg, kolmogorov_distance(f, h) + kolmogorov_distance(h, g) + 1e-12);
    EXPECT_LE(fg, kfg + 1e-9);
  }
}

TEST(Kolmogorov, SimpleCases) {
  std::mt19937_64 rng(4);
  const StepCdf f = lattice_cdf(rng, 30);
  EXPECT_EQ(kolmogorov_distance(f, f), 0.0);
  EXPECT_DOUBLE_EQ(kolmogorov_distance(point_mass(0.0), point_mass(0.2)), 1.0);
}

TEST(Kolmogorov, MatchesDenseGrid) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 3; ++t) {
    const StepCdf f = lattice_cdf(rng, 40);
    const StepCdf g = lattice_cdf(rng, 25);
    EXPECT_NEAR(kolmogorov_distance(f, g), brute_kolmogorov(f, g), 1e-9);
  }
}

TEST(StepCdf, Construction) {
  EXPECT_THROW(StepCdf::from_points({0.0, 1.0}, {0.5, 0.4}), DomainError);
  EXPECT_THROW(StepCdf::from_points({0.0}, {1.0, 0.0}), ShapeError);
  const StepCdf f = StepCdf::from_points({2.0, 1.0, 1.0}, {0.25, 0.5, 0.25});
  EXPECT_DOUBLE_EQ(f(1.0), 0.75);
  EXPECT_DOUBLE_EQ(f.left_limit(1.0), 0.0);
  EXPECT_TRUE(f.valid());
}

SymMatrix wigner(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> x(n * (n + 1) / 2);
  for (double& v : x) v = g(rng);
  return symmetric_from_lower(x, n);
}

TEST(StieltjesBound, IdenticalMatrices) {
  std::mt19937_64 rng(6);
  const SymMatrix a = wigner(rng, 20);
  for (const auto& check : {stieltjes_diff_bound(a, a, {0.0, 1.0}),
                            stieltjes_diff_frobenius_bound(a, a, {0.0, 1.0})}) {
    EXPECT_EQ(check.lhs, 0.0);
    EXPECT_EQ(check.rhs, 0.0);
  }
  EXPECT_THROW(stieltjes_diff_bound(a, wigner(rng, 3), {0.0, 1.0}), ShapeError);
}

TEST(StieltjesBound, SmallPositiveDiagonalPerturbation) {
  std::mt19937_64 rng(7);
  const SymMatrix a = wigner(rng, 50);
  Matrix b = a.dense();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(50);
  double s = 0.0;
  for (double& v : d) s += (v = u(rng));
  for (int i = 0; i < 50; ++i) b(i, i) += 0.01 * d[static_cast<std::size_t>(i)] / s;
  const BoundCheck c = stieltjes_diff_bound(a, SymMatrix::from_lower(b), {0.0, 1.0});
  EXPECT_GT(c.lhs, 0.0);
  EXPECT_TRUE(c.holds());
}

TEST(StieltjesBound, FrobeniusFormHoldsOnRandomPairs) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> order(1, 40);
  std::uniform_real_distribution<double> re(-3.0, 3.0);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = order(rng);
    const double y = std::array<double, 3>{0.5, 1.0, 2.0}[static_cast<std::size_t>(t % 3)];
    const BoundCheck c =
        stieltjes_diff_frobenius_bound(wigner(rng, n), wigner(rng, n), {re(rng), y});
    violations += c.holds() ? 0 : 1;
  }
  EXPECT_EQ(violations, 0);
}

TEST(StieltjesBound, TraceFormFailsOnTraceFreeDifference) {
  // A - B = diag(1, -1) has zero trace, so the trace-root bound is 0 while
  // S_A(i) - S_B(i) = i/2 - i.
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  const BoundCheck c =
      stieltjes_diff_bound(SymMatrix::from_lower(a), SymMatrix::from_lower(Matrix::Zero(2, 2)),
                           {0.0, 1.0});
  EXPECT_NEAR(c.lhs, 0.5, 1e-15);
  EXPECT_EQ(c.rhs, 0.0);
  EXPECT_FALSE(c.holds());
}

TEST(LevyGramBound, Cases) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Matrix a(20, 10);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  const BoundCheck same = levy_gram_bound(a, a);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_EQ(same.rhs, 0.0);
  EXPECT_TRUE(levy_gram_bound(a, Matrix::Zero(20, 10)).holds());
  EXPECT_THROW(levy_gram_bound(a, Matrix::Zero(10, 20)), ShapeError);
}

TEST(LevyGramBound, GaussianVersusRademacher) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::bernoulli_distribution coin;
    const Eigen::Index n = 12, p = 6;
    Matrix a(n, p), b(n, p);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = g(rng) / std::sqrt(static_cast<double>(n));
      b.data()[i] = (coin(rng) ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
    }
    EXPECT_TRUE(levy_gram_bound(a, b).holds()) << seed;
  }
}

TEST(Lindeberg, SimpleCases) {
  std::vector<double> x(15, 0.5);
  EXPECT_EQ(lindeberg_statistic(x, 1.0), 0.0);
  std::fill(x.begin(), x.end(), 0.0);
  x[4] = 3.0;
  EXPECT_DOUBLE_EQ(lindeberg_statistic(x, 1.0), 9.0 / 25.0);
  EXPECT_THROW(lindeberg_statistic(std::vector<double>(4, 0.0), 1.0), ShapeError);
  EXPECT_THROW(lindeberg_statistic(x, 0.0), DomainError);
}

TEST(Lindeberg, GaussianTrendToZero) {
  std::vector<double> means;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    double s = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      std::mt19937_64 rng(seed * 1000 + n);
      std::normal_distribution<double> g;
      std::vector<double> x(n * (n + 1) / 2);
      for (double& v : x) v = g(rng);
      s += lindeberg_statistic(x, 0.5 * std::sqrt(static_cast<double>(n)));
    }
    means.push_back(s / 50.0);
  }
  for (std::size_t i = 1; i < means.size(); ++i) EXPECT_LE(means[i], means[i - 1]);
  EXPECT_LT(means.back(), 1e-8);
}

}  // namespace
}  // namespace gramlimit
