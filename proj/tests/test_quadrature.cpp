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

#include <cmath>

#include <gtest/gtest.h>

#include "gramlimit/quadrature.hpp"

namespace gramlimit {
namespace {

TEST(GaussLegendre, WeightsSumToIntervalLength) {
  for (int order : {2, 5, 10, 20}) {
    const GaussLegendre& gl = gauss_legendre(order);
    double s = 0.0;
    for (double w : gl.weights) s += w;
    EXPECT_NEAR(s, 2.0, 1e-14) << order;
  }
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
  const int order = 6;
  const GaussLegendre& gl = gauss_legendre(order);
  for (int deg = 0; deg <= 2 * order - 1; ++deg) {
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += gl.weights[i] * std::pow(gl.abscissae[i], deg);
    const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
    EXPECT_NEAR(s, exact, 1e-14) << deg;
  }
}

TEST(PanelRule, SmoothIntegrand) {
  const PanelRule rule(0.0, kPi, {}, {}, 8);
  EXPECT_NEAR(rule.integrate([](double x) { return std::sin(x); }), 2.0, 1e-14);
}

TEST(PanelRule, BreakpointKeepsKinkExact) {
  const std::vector<double> bp{1.0};
  const PanelRule rule(0.0, 3.0, bp, {}, 3);
  // |x - 1| is piecewise linear with the kink on a panel boundary.
  EXPECT_NEAR(rule.integrate([](double x) { return std::abs(x - 1.0); }), 0.5 + 2.0, 1e-14);
}

TEST(PanelRule, PowerSingularityAtEndpoint) {
  const std::vector<double> sing{0.0};
  const double alpha = 0.6;
  const PanelRule rule(0.0, kPi, {}, sing, 16);
  const double got = rule.integrate([&](double x) { return std::pow(x, -alpha); }, alpha);
  const double exact = std::pow(kPi, 1.0 - alpha) / (1.0 - alpha);
  EXPECT_NEAR(got, exact, 1e-8 * exact);
}

TEST(PanelRule, PanelListCoversInterval) {
  const std::vector<double> sing{0.0};
  const PanelRule rule(0.0, kPi, {}, sing, 8);
  double covered = 0.0;
  for (const auto& p : rule.panel_list()) {
    EXPECT_LT(p.a, p.b);
    covered += p.b - p.a;
  }
  for (const auto& s : rule.slivers()) covered += s.width;
  EXPECT_NEAR(covered, kPi, 1e-13);
}

TEST(AdaptiveIntegrate, ReachesTolerance) {
  AdaptiveOptions opts;
  opts.tol = 1e-12;
  const double got =
      adaptive_integrate(opts, [](double x) { return std::exp(std::cos(x)); });
  // pi * I_0(1)
  EXPECT_NEAR(got, kPi * std::cyl_bessel_i(0.0, 1.0), 1e-11);
}

TEST(AdaptiveIntegrate, ThrowsWhenBudgetExhausted) {
  AdaptiveOptions opts;
  opts.tol = 1e-15;
  opts.max_evaluations = 200;
  EXPECT_THROW(adaptive_integrate(opts, [](double x) { return std::sqrt(std::abs(x - 1.0)); }),
               QuadratureError);
}

}  // namespace
}  // namespace gramlimit
