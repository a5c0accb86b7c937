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

#ifndef GRAMLIMIT_QUADRATURE_HPP_
#define GRAMLIMIT_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "gramlimit/common.hpp"

namespace gramlimit {

/// Gauss-Legendre abscissae and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> abscissae;
  std::vector<double> weights;
};

/// Cached rule of the given order, computed by the Golub-Welsch method.
const GaussLegendre& gauss_legendre(int order);

/// Composite Gauss-Legendre rule on a bounded interval.
///
/// Panels are distributed over the gaps between breakpoints in proportion to
/// their length. A panel touching a singular point is replaced by a dyadic
/// cascade of panels shrinking toward it; the innermost sliver of width
/// `endpoint_width` is integrated with a power-law model g(x) ~ |x - s|^-alpha,
/// so an integrable power singularity costs O(log(1/eps)) evaluations.
class PanelRule {
 public:
  struct Sliver {
    double node;   // evaluation point at the outer edge of the sliver
    double width;  // distance from the singular point to `node`
  };
  /// Panel [a, b] owns nodes [first, first + order).
  struct Panel {
    double a;
    double b;
    std::size_t first;
  };

  PanelRule(double lo, double hi, std::span<const double> breakpoints,
            std::span<const double> singular_points, std::size_t panels,
            int order = 10);

  /// Integral of g over [lo, hi]; `alpha` is the power-law exponent assumed
  /// inside the slivers (0 for bounded integrands).
  template <typename G>
  auto integrate(G&& g, double alpha = 0.0) const {
    using R = std::decay_t<std::invoke_result_t<G&, double>>;
    R acc{};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      acc += weights_[i] * g(nodes_[i]);
    }
    const double sliver_scale = 1.0 / (1.0 - alpha);
    for (const Sliver& s : slivers_) {
      acc += (s.width * sliver_scale) * g(s.node);
    }
    return acc;
  }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const Sliver> slivers() const { return slivers_; }
  std::size_t evaluations() const { return nodes_.size() + slivers_.size(); }
  std::size_t panels() const { return panels_; }
  std::span<const Panel> panel_list() const { return panel_list_; }
  int order() const { return order_; }

 private:
  void add_panel(double a, double b, const GaussLegendre& gl);

  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<Sliver> slivers_;
  std::vector<Panel> panel_list_;
  std::size_t panels_ = 0;
  int order_ = 0;
};

/// Panel-doubling driver around PanelRule: starts at `initial_panels` and
/// doubles until two successive estimates agree to `tol * max(|I|, scale)`.
/// Throws QuadratureError once the next rule would exceed `max_evaluations`.
struct AdaptiveOptions {
  double lo = 0.0;
  double hi = kPi;
  std::vector<double> breakpoints;
  std::vector<double> singular_points;
  double tol = 1e-10;
  double scale = 0.0;
  std::size_t initial_panels = 8;
  std::size_t max_evaluations = std::size_t{1} << 20;
};

template <typename G>
auto adaptive_integrate(const AdaptiveOptions& opts, G&& g, double alpha = 0.0) {
  std::size_t panels = opts.initial_panels;
  std::size_t spent = 0;
  PanelRule coarse(opts.lo, opts.hi, opts.breakpoints, opts.singular_points,
                   panels);
  auto previous = coarse.integrate(g, alpha);
  spent += coarse.evaluations();
  for (;;) {
    panels *= 2;
    PanelRule fine(opts.lo, opts.hi, opts.breakpoints, opts.singular_points,
                   panels);
    if (spent + fine.evaluations() > opts.max_evaluations) {
      throw QuadratureError("quadrature did not reach tolerance within " +
                            std::to_string(opts.max_evaluations) +
                            " evaluations");
    }
    auto current = fine.integrate(g, alpha);
    spent += fine.evaluations();
    using std::abs;
    const double err = abs(current - previous);
    if (err <= opts.tol * std::max(abs(current), opts.scale)) {
      return current;
    }
    previous = current;
  }
}

}  // namespace gramlimit

#endif  // GRAMLIMIT_QUADRATURE_HPP_
