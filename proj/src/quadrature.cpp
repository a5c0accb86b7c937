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

#include "gramlimit/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace gramlimit {

namespace {

GaussLegendre golub_welsch(int order) {
  Matrix jacobi = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi);
  GaussLegendre rule;
  rule.abscissae.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.abscissae[i] = solver.eigenvalues()(i);
    const double v = solver.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v * v;
  }
  // Symmetrize against round-off so that even integrands stay exactly even.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (rule.abscissae[j] - rule.abscissae[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.abscissae[i] = -x;
    rule.abscissae[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.abscissae[order / 2] = 0.0;
  return rule;
}

// Slivers stop at this fraction of the integration range.
constexpr double kSliverFraction = 1e-13;

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    if (order < 1) throw DomainError("Gauss-Legendre order must be positive");
    it = cache.emplace(order, golub_welsch(order)).first;
  }
  return it->second;
}

void PanelRule::add_panel(double a, double b, const GaussLegendre& gl) {
  panel_list_.push_back({a, b, nodes_.size()});
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < gl.abscissae.size(); ++i) {
    nodes_.push_back(mid + half * gl.abscissae[i]);
    weights_.push_back(half * gl.weights[i]);
  }
  ++panels_;
}

PanelRule::PanelRule(double lo, double hi, std::span<const double> breakpoints,
                     std::span<const double> singular_points,
                     std::size_t panels, int order) {
  if (!(hi > lo)) throw DomainError("PanelRule: empty interval");
  const GaussLegendre& gl = gauss_legendre(order);
  order_ = order;
  const double range = hi - lo;
  const double sliver = kSliverFraction * range;

  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::vector<double> singular;
  for (double s : singular_points) {
    if (s >= lo && s <= hi) {
      singular.push_back(s);
      if (s > lo && s < hi) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto is_singular = [&](double x) {
    return std::find(singular.begin(), singular.end(), x) != singular.end();
  };

  panels = std::max<std::size_t>(panels, 1);
  for (std::size_t g = 0; g + 1 < cuts.size(); ++g) {
    const double a = cuts[g];
    const double b = cuts[g + 1];
    const bool left_singular = is_singular(a);
    const bool right_singular = is_singular(b);
    std::size_t count = static_cast<std::size_t>(
        std::ceil(static_cast<double>(panels) * (b - a) / range));
    count = std::max<std::size_t>(count, 1);
    if (left_singular && right_singular) count = std::max<std::size_t>(count, 2);
    const double h = (b - a) / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double pa = a + h * static_cast<double>(k);
      const double pb = (k + 1 == count) ? b : pa + h;
      if (k == 0 && left_singular) {
        double outer = pb - pa;
        while (outer > sliver) {
          add_panel(pa + 0.5 * outer, pa + outer, gl);
          outer *= 0.5;
        }
        slivers_.push_back({pa + outer, outer});
      } else if (k + 1 == count && right_singular) {
        double outer = pb - pa;
        while (outer > sliver) {
          add_panel(pb - outer, pb - 0.5 * outer, gl);
          outer *= 0.5;
        }
        slivers_.push_back({pb - outer, outer});
      } else {
        add_panel(pa, pb, gl);
      }
    }
  }
}

}  // namespace gramlimit
