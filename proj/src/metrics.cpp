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

#include "gramlimit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gramlimit {

StepCdf StepCdf::from_esd(const Esd& e) {
  if (e.size() == 0) throw DomainError("empty spectral distribution");
  const auto eigs = e.eigs();
  std::vector<double> points(eigs.begin(), eigs.end());
  std::vector<double> weights(points.size(), 1.0 / static_cast<double>(points.size()));
  return from_points(std::move(points), std::move(weights));
}

StepCdf StepCdf::from_points(std::vector<double> points, std::vector<double> weights) {
  if (points.size() != weights.size() || points.empty()) {
    throw ShapeError("step CDF needs matching, nonempty points and weights");
  }
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  StepCdf f;
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    if (!(weights[idx] >= 0.0)) throw DomainError("step CDF weights must be >= 0");
    cumulative += weights[idx];
    if (!f.t_.empty() && f.t_.back() == points[idx]) {
      f.right_.back() = cumulative;
      continue;
    }
    f.left_.push_back(f.right_.empty() ? 0.0 : f.right_.back());
    f.t_.push_back(points[idx]);
    f.right_.push_back(cumulative);
  }
  if (std::abs(cumulative - 1.0) > 1e-12) {
    throw DomainError("step CDF weights must sum to 1");
  }
  f.right_.back() = 1.0;
  return f;
}

StepCdf StepCdf::from_grid(std::span<const double> x, std::span<const double> values) {
  if (x.size() != values.size() || x.empty()) {
    throw ShapeError("grid CDF needs matching, nonempty columns");
  }
  StepCdf f;
  f.t_.assign(x.begin(), x.end());
  f.right_.assign(values.begin(), values.end());
  f.left_ = f.right_;
  f.left_[0] = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("grid CDF nodes must increase");
  }
  return f;
}

double StepCdf::operator()(double x) const {
  auto it = std::upper_bound(t_.begin(), t_.end(), x);
  if (it == t_.begin()) return 0.0;
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  if (i + 1 == t_.size() || x == t_[i]) return right_[i];
  const double w = (x - t_[i]) / (t_[i + 1] - t_[i]);
  return right_[i] + w * (left_[i + 1] - right_[i]);
}

double StepCdf::left_limit(double x) const {
  auto it = std::lower_bound(t_.begin(), t_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t_.begin());
  if (j < t_.size() && t_[j] == x) return left_[j];
  return (*this)(x);
}

bool StepCdf::valid() const {
  double previous = 0.0;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (left_[i] < previous - 1e-15 || right_[i] < left_[i] - 1e-15) return false;
    if (left_[i] < 0.0 || right_[i] > 1.0 + 1e-12) return false;
    previous = right_[i];
  }
  return true;
}

namespace {

// True when G(x) <= F(x + eps) + eps and F(x - eps) - eps <= G(x) for all x.
bool inside_corridor(const StepCdf& f, const StepCdf& g, double eps) {
  constexpr double kSlack = 1e-15;
  auto check_at = [&](double x) {
    if (g(x) > f(x + eps) + eps + kSlack) return false;
    if (g.left_limit(x) > f.left_limit(x + eps) + eps + kSlack) return false;
    if (f(x - eps) - eps > g(x) + kSlack) return false;
    if (f.left_limit(x - eps) - eps > g.left_limit(x) + kSlack) return false;
    return true;
  };
  for (double t : g.knots()) {
    if (!check_at(t)) return false;
  }
  for (double t : f.knots()) {
    if (!check_at(t - eps) || !check_at(t + eps)) return false;
  }
  return true;
}

}  // namespace

double levy_distance(const StepCdf& f, const StepCdf& g) {
  if (inside_corridor(f, g, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (inside_corridor(f, g, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double kolmogorov_distance(const StepCdf& f, const StepCdf& g) {
  double worst = 0.0;
  auto probe = [&](double t) {
    worst = std::max(worst, std::abs(f(t) - g(t)));
    worst = std::max(worst, std::abs(f.left_limit(t) - g.left_limit(t)));
  };
  for (double t : f.knots()) probe(t);
  for (double t : g.knots()) probe(t);
  return worst;
}

namespace {

Complex stieltjes_any(const Esd& e, Complex z) {
  Complex s = 0.0;
  for (double lambda : e.eigs()) s += 1.0 / (lambda - z);
  return s / static_cast<double>(e.size());
}

BoundCheck stieltjes_lhs(const SymMatrix& a, const SymMatrix& b, Complex z) {
  if (a.order() != b.order()) throw ShapeError("matrices differ in order");
  if (z.imag() == 0.0) throw DomainError("bound needs Im z != 0");
  BoundCheck out;
  out.lhs = std::abs(stieltjes_any(symmetric_eigenvalues(a), z) -
                     stieltjes_any(symmetric_eigenvalues(b), z));
  return out;
}

}  // namespace

BoundCheck stieltjes_diff_bound(const SymMatrix& a, const SymMatrix& b, Complex z) {
  BoundCheck out = stieltjes_lhs(a, b, z);
  const double y = z.imag();
  const double n = static_cast<double>(a.order());
  out.rhs = std::sqrt(std::abs((a.dense() - b.dense()).trace())) / (y * y * std::sqrt(n));
  return out;
}

BoundCheck stieltjes_diff_frobenius_bound(const SymMatrix& a, const SymMatrix& b,
                                          Complex z) {
  BoundCheck out = stieltjes_lhs(a, b, z);
  const double y = z.imag();
  const double n = static_cast<double>(a.order());
  out.rhs = (a.dense() - b.dense()).norm() / (y * y * std::sqrt(n));
  return out;
}

BoundCheck levy_gram_bound(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("levy_gram_bound: shapes differ");
  }
  const Matrix aa = a * a.transpose();
  const Matrix bb = b * b.transpose();
  const StepCdf fa = StepCdf::from_esd(symmetric_eigenvalues(SymMatrix::from_lower(aa)));
  const StepCdf fb = StepCdf::from_esd(symmetric_eigenvalues(SymMatrix::from_lower(bb)));
  const double d = levy_distance(fa, fb);
  const double n = static_cast<double>(a.rows());
  BoundCheck out;
  out.lhs = d * d;
  out.rhs = std::sqrt(2.0) / n *
            std::sqrt((aa.trace() + bb.trace()) * (a - b).squaredNorm());
  return out;
}

double lindeberg_statistic(std::span<const double> lower_entries, double a) {
  if (!(a > 0.0)) throw DomainError("Lindeberg level A must be positive");
  const std::size_t m = lower_entries.size();
  const auto n = static_cast<std::size_t>(
      std::llround((std::sqrt(8.0 * static_cast<double>(m) + 1.0) - 1.0) / 2.0));
  if (n * (n + 1) / 2 != m || n == 0) {
    throw ShapeError("Lindeberg statistic needs n(n+1)/2 entries");
  }
  double s = 0.0;
  for (double x : lower_entries) {
    if (std::abs(x) > a) s += x * x;
  }
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace gramlimit
