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

#include <gtest/gtest.h>

#include "gramlimit/spectral.hpp"

namespace gramlimit {
namespace {

// c_k for the fractional family from the closed form
// c_0 = sigma2 Gamma(1 - 2d) / Gamma(1 - d)^2, c_k = c_{k-1} (k - 1 + d) / (k - d).
std::vector<double> fractional_covariances(double d, double sigma2, std::size_t n) {
  std::vector<double> c(n + 1);
  c[0] = sigma2 * std::tgamma(1.0 - 2.0 * d) / std::pow(std::tgamma(1.0 - d), 2);
  for (std::size_t k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    c[k] = c[k - 1] * (kd - 1.0 + d) / (kd - d);
  }
  return c;
}

std::vector<SpectralDensity> families() {
  return {SpectralDensity::constant(2.0), SpectralDensity::ar1(0.5),
          SpectralDensity::ar1(-0.7, 3.0), SpectralDensity::ma1(0.4),
          SpectralDensity::fractional(0.3),
          SpectralDensity::tabulated({0.0, 1.0, kPi}, {0.5, 0.1, 0.3}),
          truncate_density(SpectralDensity::fractional(0.3), 2.0)};
}

TEST(SpectralDensity, PointValues) {
  EXPECT_NEAR(SpectralDensity::constant(1.0)(0.7), 1.0 / kTwoPi, 1e-15);
  const SpectralDensity f = SpectralDensity::fractional(0.3);
  EXPECT_TRUE(std::isinf(f(0.0)));
  EXPECT_NEAR(f(kPi), std::pow(2.0, -0.6) / kTwoPi, 1e-15);
  EXPECT_NEAR(f(kPi), 0.1050, 5e-5);
  EXPECT_EQ(f.singular_points(), std::vector<double>{0.0});
}

TEST(SpectralDensity, RejectsOutOfRangeArgument) {
  EXPECT_THROW(SpectralDensity::constant(1.0)(3.2), DomainError);
  EXPECT_THROW(eval_density(SpectralDensity::ar1(0.5), -4.0), DomainError);
}

TEST(SpectralDensity, RejectsInvalidParameters) {
  EXPECT_THROW(SpectralDensity::fractional(0.7), DomainError);
  EXPECT_THROW(SpectralDensity::fractional(0.0), DomainError);
  EXPECT_THROW(SpectralDensity::ar1(1.0), DomainError);
  EXPECT_THROW(SpectralDensity::constant(-1.0), DomainError);
}

TEST(SpectralDensity, EvenAndNonnegative) {
  for (const SpectralDensity& f : families()) {
    for (int i = 1; i <= 200; ++i) {
      const double lam = kPi * i / 200.0;
      EXPECT_EQ(f(lam), f(-lam)) << f.describe();
      EXPECT_GE(f(lam), 0.0) << f.describe();
    }
  }
}

TEST(Covariance, ConstantFamily) {
  const SpectralDensity f = SpectralDensity::constant(1.0);
  EXPECT_NEAR(covariance_from_density(f, 0), 1.0, 1e-12);
  EXPECT_NEAR(covariance_from_density(f, 3), 0.0, 1e-12);
}

TEST(Covariance, Ar1GeometricOracle) {
  const double phi = 0.5;
  const SpectralDensity f = SpectralDensity::ar1(phi);
  EXPECT_NEAR(covariance_from_density(f, 1), 2.0 / 3.0, 1e-10);
  const auto c = covariances_from_density(f, 20);
  for (int k = 0; k <= 20; ++k) {
    EXPECT_NEAR(c[static_cast<std::size_t>(k)], std::pow(phi, k) / (1.0 - phi * phi), 1e-8) << k;
    EXPECT_NEAR(covariance_from_density(f, -k), c[static_cast<std::size_t>(k)], 1e-10);
  }
}

TEST(Covariance, Ma1Oracle) {
  const SpectralDensity f = SpectralDensity::ma1(0.4, 2.0);
  EXPECT_NEAR(covariance_from_density(f, 0), 2.0 * (1.0 + 0.16), 1e-10);
  EXPECT_NEAR(covariance_from_density(f, 1), 2.0 * 0.4, 1e-10);
  EXPECT_NEAR(covariance_from_density(f, 2), 0.0, 1e-10);
}

TEST(Covariance, FractionalClosedForm) {
  const auto oracle = fractional_covariances(0.3, 1.0, 30);
  const auto c = covariances_from_density(SpectralDensity::fractional(0.3), 30);
  for (std::size_t k = 0; k <= 30; ++k) {
    EXPECT_NEAR(c[k], oracle[k], 1e-8 * oracle[0]) << k;
    EXPECT_LE(std::abs(c[k]), c[0] * (1.0 + 1e-12));
  }
}

TEST(Filter, ConstantFamily) {
  const LinearFilter a = filter_from_density(SpectralDensity::constant(1.0));
  EXPECT_NEAR(a[0], 1.0, 1e-12);
  for (long k = a.min_lag(); k <= a.max_lag(); ++k) {
    if (k != 0) {
      EXPECT_NEAR(a[k], 0.0, 1e-12);
    }
  }
  EXPECT_NEAR(filter_from_density(SpectralDensity::constant(4.0))[0], 2.0, 1e-12);
}

TEST(Filter, ParsevalAndEvenness) {
  for (const SpectralDensity& f :
       {SpectralDensity::ar1(0.5), SpectralDensity::ma1(-0.6), SpectralDensity::ar1(0.9, 2.0)}) {
    const double tol = 1e-6;
    const LinearFilter a = filter_from_density(f, tol);
    const double c0 = covariance_from_density(f, 0);
    EXPECT_LE(a.energy(), c0 * (1.0 + 1e-10)) << f.describe();
    EXPECT_GE(a.energy(), c0 * (1.0 - tol)) << f.describe();
    EXPECT_LE(a.tail_bound(), tol * c0);
    for (long k = 1; k <= a.max_lag(); ++k) EXPECT_NEAR(a[k], a[-k], 1e-10);
  }
}

TEST(Filter, FilterCovariancesMatchDensity) {
  const SpectralDensity f = SpectralDensity::ar1(0.6);
  const LinearFilter a = filter_from_density(f, 1e-10);
  for (long h = 0; h <= 5; ++h) {
    EXPECT_NEAR(a.autocovariance(h), covariance_from_density(f, h), 1e-6) << h;
  }
}

TEST(Filter, FractionalCoarseTolerance) {
  const SpectralDensity f = SpectralDensity::fractional(0.3);
  const double tol = 1e-2;
  const LinearFilter a = filter_from_density(f, tol);
  const double c0 = covariance_from_density(f, 0);
  EXPECT_GE(a.energy(), c0 * (1.0 - tol));
  EXPECT_LE(a.energy(), c0 * (1.0 + 1e-9));
  // Truncating the filter biases each covariance by at most
  // 2 sqrt(c0 * tail) + tail (Cauchy-Schwarz on the discarded part).
  const double bias = 2.0 * std::sqrt(c0 * a.tail_bound()) + a.tail_bound();
  for (long h = 0; h <= 5; ++h) {
    EXPECT_NEAR(a.autocovariance(h), covariance_from_density(f, h), bias + 1e-8) << h;
  }
}

TEST(Filter, FractionalFineToleranceIsUnreachable) {
  // The squared coefficients decay like k^{2d-2}, so a relative tail of
  // 1e-6 needs a half-width near 1e15; the cap surfaces that loudly.
  EXPECT_THROW(filter_from_density(SpectralDensity::fractional(0.3), 1e-6), TailToleranceError);
}

TEST(Truncation, PointwiseMinimum) {
  const SpectralDensity low = truncate_density(SpectralDensity::constant(1.0), 0.1);
  const SpectralDensity high = truncate_density(SpectralDensity::constant(1.0), 1.0);
  for (double lam : {0.0, 0.5, 2.0, kPi}) {
    EXPECT_DOUBLE_EQ(low(lam), 0.1);
    EXPECT_DOUBLE_EQ(high(lam), 1.0 / kTwoPi);
  }
  const SpectralDensity f = SpectralDensity::fractional(0.3);
  const SpectralDensity g = truncate_density(f, 5.0);
  EXPECT_TRUE(g.singular_points().empty());
  EXPECT_TRUE(g.bounded());
  EXPECT_DOUBLE_EQ(g(0.0), 5.0);
  EXPECT_DOUBLE_EQ(g(1e-6), 5.0);
  EXPECT_DOUBLE_EQ(g(1.0), f(1.0));
  EXPECT_DOUBLE_EQ(g(kPi), f(kPi));
}

TEST(Truncation, MassMonotoneInLevel) {
  const SpectralDensity f = SpectralDensity::fractional(0.3);
  const double full = covariance_from_density(f, 0);
  double prev = 0.0;
  for (double b : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    const double m = covariance_from_density(truncate_density(f, b), 0);
    EXPECT_GE(m, prev) << b;
    EXPECT_LE(m, full) << b;
    prev = m;
  }
  EXPECT_GT(prev, 0.97 * full);
}

TEST(Pushforward, ConstantIsPointMass) {
  const std::vector<double> grid{0.5, 1.5, 1.99, 2.0, 2.5};
  const Pushforward h = h_pushforward(SpectralDensity::constant(2.0), grid);
  EXPECT_EQ(h.cdf, (std::vector<double>{0.0, 0.0, 0.0, 1.0, 1.0}));
  ASSERT_EQ(h.atoms.size(), 1u);
  EXPECT_DOUBLE_EQ(h.atoms[0].location, 2.0);
  EXPECT_DOUBLE_EQ(h.atoms[0].mass, 1.0);
}

TEST(Pushforward, LinearDensityGivesUniformLaw) {
  // 2 pi f(l) = |l|, so H is uniform on [0, pi].
  const SpectralDensity f = SpectralDensity::tabulated({0.0, kPi}, {0.0, 0.5});
  std::vector<double> grid;
  for (int i = 1; i <= 50; ++i) grid.push_back(kPi * i / 50.0);
  const Pushforward h = h_pushforward(f, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(h.cdf[i], grid[i] / kPi, 1e-9);
}

TEST(Pushforward, FractionalMatchesMonteCarlo) {
  const SpectralDensity f = SpectralDensity::fractional(0.3);
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const std::size_t m = 1000000;
  std::vector<double> v(m);
  for (double& x : v) x = kTwoPi * f.eval_unchecked(u(rng));
  std::sort(v.begin(), v.end());
  std::vector<double> grid;
  for (int i = 0; i < 400; ++i) grid.push_back(0.6 + 0.02 * i);
  const Pushforward h = h_pushforward(f, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double emp = static_cast<double>(std::upper_bound(v.begin(), v.end(), grid[i]) - v.begin()) /
                       static_cast<double>(m);
    worst = std::max(worst, std::abs(emp - h.cdf[i]));
  }
  EXPECT_LE(worst, 0.005);
}

TEST(Pushforward, ValidCdfReachingOne) {
  for (const SpectralDensity& f : families()) {
    if (!f.bounded()) continue;
    std::vector<double> grid;
    const double top = kTwoPi * f.supremum();
    for (int i = 1; i <= 100; ++i) grid.push_back(top * 1.01 * i / 100.0);
    const Pushforward h = h_pushforward(f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_GE(h.cdf[i], 0.0);
      EXPECT_LE(h.cdf[i], 1.0);
      if (i > 0) {
        EXPECT_GE(h.cdf[i], h.cdf[i - 1]);
      }
    }
    EXPECT_DOUBLE_EQ(h.cdf.back(), 1.0) << f.describe();
  }
}

TEST(Pushforward, RejectsBadGrid) {
  const SpectralDensity f = SpectralDensity::ar1(0.5);
  EXPECT_THROW(h_pushforward(f, std::vector<double>{}), DomainError);
  EXPECT_THROW(h_pushforward(f, std::vector<double>{1.0, 1.0}), DomainError);
}

TEST(RegularityProfile, TailSums) {
  const LinearFilter a({3.0, 4.0}, 0);
  EXPECT_DOUBLE_EQ(regularity_profile(a, 2), 0.0);
  EXPECT_DOUBLE_EQ(regularity_profile(a, 1), 4.0);
  EXPECT_DOUBLE_EQ(regularity_profile(a, 0), 5.0);
  EXPECT_THROW(regularity_profile(LinearFilter({1.0, 2.0, 1.0}, 1), 0), DomainError);
}

TEST(RegularityProfile, CausalFractionalDecreases) {
  const LinearFilter a = causal_filter(SpectralDensity::fractional(0.3), 1e-2);
  // Independent partial sums over the computed coefficients.
  const auto c = a.coeffs();
  std::vector<double> tail(c.size() + 1, 0.0);
  for (std::size_t k = c.size(); k > 0; --k) tail[k - 1] = tail[k] + c[k - 1] * c[k - 1];
  const double eta0 = regularity_profile(a, 0);
  double prev = eta0;
  for (std::size_t m = 1; m <= c.size(); m *= 2) {
    const double eta = regularity_profile(a, m);
    EXPECT_NEAR(eta, std::sqrt(tail[m]), 1e-12 * eta0);
    EXPECT_LT(eta, prev);
    prev = eta;
  }
  EXPECT_LT(regularity_profile(a, c.size()), 1e-3 * eta0);
}

TEST(CausalFilter, Ar1Coefficients) {
  const LinearFilter a = causal_filter(SpectralDensity::ar1(0.5), 1e-12);
  ASSERT_TRUE(a.causal());
  for (long k = 0; k < 10; ++k) EXPECT_NEAR(a[k], std::pow(0.5, k), 1e-15);
}

}  // namespace
}  // namespace gramlimit
