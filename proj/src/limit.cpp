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

#include "gramlimit/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gramlimit/quadrature.hpp"

namespace gramlimit {

namespace {

constexpr int kOrder = 10;
constexpr std::size_t kBasePanels = 16;
constexpr double kHerglotzFloor = 1e-14;
constexpr double kUniquenessTol = 1e-9;
constexpr double kColdHomotopyBelow = 0.05;

// 1 / (2 pi f); zero where f is infinite, +inf where f vanishes.
double inverse_symbol(double fv) {
  if (std::isinf(fv)) return 0.0;
  if (!(fv > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / (kTwoPi * fv);
}

struct Moment {
  Complex j{};
  Complex dj{};

  void add(double q, double w, Complex s) {
    const double re = s.real() + w;
    const double im = s.imag();
    const double n = re * re + im * im;
    const Complex t(re / n, -im / n);
    j += q * t;
    dj -= q * (t * t);
  }
  void remove(double q, double w, Complex s) {
    Moment m;
    m.add(q, w, s);
    j -= m.j;
    dj -= m.dj;
  }
};

class HerglotzLoss : public std::exception {};

}  // namespace

void SolverSettings::validate() const {
  std::vector<std::string> errors;
  if (!(tol > 0.0)) errors.emplace_back("tol must be positive");
  if (max_iter < 1) errors.emplace_back("max_iter must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) {
    errors.emplace_back("damping must lie in (0, 1]");
  }
  if (!(quad_tol > 0.0)) errors.emplace_back("quad_tol must be positive");
  if (!errors.empty()) {
    std::string msg = "invalid solver settings: " + errors.front();
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    throw DomainError(msg);
  }
}

Complex companion(Complex s, double c, Complex z) {
  return -(1.0 - c) / z + c * s;
}

Complex companion_inverse(Complex s_under, double c, Complex z) {
  return (s_under + (1.0 - c) / z) / c;
}

// ---------------------------------------------------------------------------
// DensityEquation

struct DensityEquation::Level {
  std::vector<double> a, b;            // panels sorted by position
  std::vector<double> lam, q, w;       // panel nodes, panel-major
  std::vector<double> sliver_q, sliver_w;
};

DensityEquation::DensityEquation(const SpectralDensity& f) : f_(f) {}
DensityEquation::~DensityEquation() = default;

const DensityEquation::Level& DensityEquation::level(std::size_t m) const {
  if (m > kMaxLevel) {
    throw QuadratureError("limit equation quadrature exceeded " +
                          std::to_string(kBasePanels << kMaxLevel) + " panels");
  }
  std::call_once(once_[m], [&] {
    // A truncated density is bounded but keeps the parent's power law just
    // past each kink, so panels are graded toward kinks and parent poles.
    std::vector<double> graded = f_.singular_points();
    if (const SpectralDensity* parent = f_.parent()) {
      graded.insert(graded.end(), f_.breakpoints().begin(), f_.breakpoints().end());
      for (double s : parent->singular_points()) graded.push_back(std::abs(s));
    }
    const PanelRule rule(0.0, kPi, f_.breakpoints(), graded, kBasePanels << m, kOrder);
    auto lv = std::make_unique<Level>();
    std::vector<PanelRule::Panel> panels(rule.panel_list().begin(),
                                         rule.panel_list().end());
    std::sort(panels.begin(), panels.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    const auto nodes = rule.nodes();
    const auto weights = rule.weights();
    for (const auto& p : panels) {
      lv->a.push_back(p.a);
      lv->b.push_back(p.b);
      for (int i = 0; i < kOrder; ++i) {
        const double lam = nodes[p.first + i];
        const double w = inverse_symbol(f_.eval_unchecked(lam));
        lv->lam.push_back(lam);
        lv->q.push_back(std::isinf(w) ? 0.0 : weights[p.first + i] / kPi);
        lv->w.push_back(std::isinf(w) ? 0.0 : w);
      }
    }
    for (const auto& s : rule.slivers()) {
      const double w = inverse_symbol(f_.eval_unchecked(s.node));
      lv->sliver_q.push_back(std::isinf(w) ? 0.0 : s.width / kPi);
      lv->sliver_w.push_back(std::isinf(w) ? 0.0 : w);
    }
    levels_[m] = std::move(lv);
  });
  return *levels_[m];
}

std::pair<Complex, Complex> DensityEquation::moment(Complex s,
                                                    std::size_t m) const {
  const Level& lv = level(m);
  Moment acc;
  const double target = -s.real();
  std::vector<std::size_t> crossings;
  const std::size_t n = lv.lam.size();
  bool prev_below = false;
  bool have_prev = false;
  for (std::size_t i = 0; i < n; ++i) {
    acc.add(lv.q[i], lv.w[i], s);
    if (lv.q[i] == 0.0) {
      have_prev = false;
      continue;
    }
    const bool below = lv.w[i] < target;
    if (have_prev && below != prev_below && crossings.size() < 8) {
      crossings.push_back(i - 1);
    }
    prev_below = below;
    have_prev = true;
  }
  for (std::size_t i = 0; i < lv.sliver_q.size(); ++i) {
    acc.add(lv.sliver_q[i], lv.sliver_w[i], s);
  }
  if (crossings.empty() || !(target > 0.0)) return {acc.j, acc.dj};

  // A near-pole of 1/(S_ + w) narrower than its panel is integrated on a
  // local cascade that replaces the panel and its two neighbours.
  const auto w_at = [&](double lam) {
    return inverse_symbol(f_.eval_unchecked(lam));
  };
  const GaussLegendre& gl = gauss_legendre(kOrder);
  const std::size_t panels = lv.a.size();
  std::size_t last_hi = 0;
  bool any = false;
  for (std::size_t i : crossings) {
    double lo = lv.lam[i];
    double hi = lv.lam[i + 1];
    const bool lo_below = lv.w[i] < target;
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((w_at(mid) < target) == lo_below) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double star = 0.5 * (lo + hi);
    std::size_t k = i / kOrder;
    if (k + 1 < panels && star > lv.b[k]) ++k;
    const double h = lv.b[k] - lv.a[k];
    const double eta = 1e-3 * h;
    const double slope = std::abs(w_at(std::min(star + eta, kPi)) -
                                  w_at(std::max(star - eta, 0.0))) /
                         (std::min(star + eta, kPi) - std::max(star - eta, 0.0));
    const double delta = slope > 0.0 ? s.imag() / slope : 0.0;
    if (delta >= 2.0 * h) continue;
    const std::size_t first = k > 0 ? k - 1 : 0;
    const std::size_t last = std::min(k + 1, panels - 1);
    if (any && first <= last_hi) continue;
    any = true;
    last_hi = last;
    for (std::size_t p = first; p <= last; ++p) {
      for (int t = 0; t < kOrder; ++t) {
        const std::size_t idx = p * kOrder + t;
        acc.remove(lv.q[idx], lv.w[idx], s);
      }
    }
    const double floor = std::max(1e-4 * delta, 4e-16 * std::max(star, 1.0));
    const auto add_panel = [&](double pa, double pb) {
      const double half = 0.5 * (pb - pa);
      const double mid = 0.5 * (pa + pb);
      for (int t = 0; t < kOrder; ++t) {
        const double w = w_at(mid + half * gl.abscissae[t]);
        if (!std::isinf(w)) acc.add(half * gl.weights[t] / kPi, w, s);
      }
    };
    double outer = star - lv.a[first];
    while (outer > floor) {
      add_panel(star - outer, star - 0.5 * outer);
      outer *= 0.5;
    }
    if (outer > 0.0) add_panel(star - outer, star);
    outer = lv.b[last] - star;
    while (outer > floor) {
      add_panel(star + 0.5 * outer, star + outer);
      outer *= 0.5;
    }
    if (outer > 0.0) add_panel(star, star + outer);
  }
  return {acc.j, acc.dj};
}

// ---------------------------------------------------------------------------
// Generic solver

namespace {

struct State {
  Complex s;
  Complex j;
  Complex r;
  Complex dr;
};

// `moment(s, level)` returns (J, dJ); levels above `max_level` are never
// requested, and `refinable` enables the panel-doubling check.
template <typename MomentFn>
LimitSolution iterate(MomentFn&& moment, bool refinable, std::size_t max_level,
                      double c, Complex z, const SolverSettings& st,
                      double damping, Complex start, std::size_t level) {
  const double scale = std::max(1.0, std::abs(z));
  const auto eval = [&](Complex s, std::size_t m) {
    const auto [j, dj] = moment(s, m);
    return State{s, j, z + 1.0 / s - c * j, -1.0 / (s * s) - c * dj};
  };
  State cur = eval(start, level);
  Complex fine_j = cur.j;
  int it = 0;
  // Newton may stall next to the real axis where |r| has boundary minima;
  // without tenfold progress within kNewtonBudget accepted steps, only the
  // contractive fixed-point map is used until progress resumes.
  constexpr int kNewtonBudget = 60;
  int budget = kNewtonBudget;
  double mark = std::abs(cur.r);
  // Newton in S_, then Newton in 1/S_ (which behaves better far from the
  // root when |S_| is large). False when neither lowers |r|.
  const auto newton = [&](State& st_cur, std::size_t m) {
    if (st_cur.dr == Complex{}) return false;
    const Complex step = st_cur.r / st_cur.dr;
    const Complex u = 1.0 / st_cur.s;
    const Complex candidates[2] = {st_cur.s - step, 1.0 / (u + step / (st_cur.s * st_cur.s))};
    for (const Complex cand : candidates) {
      if (!std::isfinite(cand.real()) || !std::isfinite(cand.imag()) ||
          !(cand.imag() > kHerglotzFloor)) {
        continue;
      }
      const State next = eval(cand, m);
      if (std::abs(next.r) < std::abs(st_cur.r)) {
        st_cur = next;
        return true;
      }
    }
    return false;
  };
  // Newton steps taken after the residual met tol; quadratic convergence
  // makes more than a few a sign of a rounding floor.
  constexpr int kPolishSteps = 6;
  int polish = 0;
  for (;;) {
    if (std::abs(cur.r) < 0.1 * mark) {
      mark = std::abs(cur.r);
      budget = kNewtonBudget;
    }
    // Near x = 0 every term of r can be far below 1, so the residual is also
    // measured against the size of the terms themselves.
    const double terms = std::max(std::abs(z), 1.0 / std::abs(cur.s));
    if (std::abs(cur.r) <= st.tol * std::min(scale, terms)) {
      // Where r' is small (hard edges) a tiny residual can still leave S_
      // loose, so the Newton step must be small too.
      if (polish < kPolishSteps && cur.dr != Complex{} &&
          std::abs(cur.r / cur.dr) > st.tol * std::abs(cur.s)) {
        polish = newton(cur, level) ? polish + 1 : kPolishSteps;
        continue;
      }
      if (!refinable) break;
      fine_j = moment(cur.s, level + 1).first;
      if (std::abs(fine_j - cur.j) <= st.quad_tol * std::abs(fine_j)) break;
      if (level + 1 > max_level) {
        throw QuadratureError(
            "limit equation quadrature did not reach quad_tol at z = " +
            std::to_string(z.real()) + (z.imag() < 0 ? "-" : "+") +
            std::to_string(std::abs(z.imag())) + "i");
      }
      ++level;
      cur = eval(cur.s, level);
      polish = 0;
      continue;
    }
    if (++it > st.max_iter) {
      std::ostringstream msg;
      msg << "limit solver did not converge within " << st.max_iter
          << " iterations at z = " << z << " (last residual "
          << std::abs(cur.r) / scale << ")";
      throw SolverError(msg.str());
    }
    // Newton first, then a damped fixed-point step.
    if (budget > 0 && newton(cur, level)) {
      --budget;
      continue;
    }
    const Complex mapped = -1.0 / (z - c * cur.j);
    const Complex s = (1.0 - damping) * cur.s + damping * mapped;
    if (!(s.imag() >= kHerglotzFloor)) throw HerglotzLoss{};
    cur = eval(s, level);
  }
  LimitSolution out;
  out.s_under = cur.s;
  out.s = companion_inverse(cur.s, c, z);
  out.residual = std::abs(cur.r) / scale;
  out.certified_residual = std::abs(z + 1.0 / cur.s - c * fine_j) / scale;
  out.iterations = it;
  out.level = level;
  return out;
}

template <typename MomentFn>
LimitSolution solve_with(MomentFn&& moment, bool refinable,
                         std::size_t max_level, double c, Complex z,
                         const SolverSettings& st, const SolveStart& start) {
  st.validate();
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("aspect ratio c must be positive");
  }
  if (!(z.imag() > 0.0)) throw DomainError("z must lie in the upper half-plane");
  const auto run = [&](Complex zz, Complex s0, std::size_t level) {
    double damping = st.damping;
    for (int attempt = 0;; ++attempt) {
      try {
        return iterate(moment, refinable, max_level, c, zz, st, damping, s0,
                       level);
      } catch (const HerglotzLoss&) {
        if (attempt >= 4) {
          throw SolverError(
              "limit iterate left the upper half-plane (Im S_ < 1e-14) at "
              "every damping tried");
        }
        damping *= 0.5;
      }
    }
  };
  // Cold starts close to the real axis follow Im z down from 1 by factors of
  // four, each solve warm-starting the next.
  const auto cold = [&](Complex s0) {
    if (z.imag() >= kColdHomotopyBelow) return run(z, s0, start.level);
    std::vector<double> heights;
    for (double h = 1.0; h > z.imag(); h *= 0.25) heights.push_back(h);
    LimitSolution sol;
    std::size_t level = start.level;
    for (double h : heights) {
      sol = run(Complex(z.real(), h), s0, level);
      s0 = sol.s_under;
      level = sol.level;
    }
    return run(z, s0, level);
  };
  LimitSolution sol = start.s_under && start.s_under->imag() > 0.0
                          ? run(z, *start.s_under, start.level)
                          : cold(-1.0 / z);
  if (st.probe_uniqueness) {
    const LimitSolution other = cold(Complex(0.0, 1.0));
    const double gap = std::abs(other.s_under - sol.s_under);
    if (gap > kUniquenessTol * std::max(1.0, std::abs(sol.s_under))) {
      std::ostringstream msg;
      msg << "limit equation has distinct solutions " << sol.s_under << " and "
          << other.s_under << " at z = " << z;
      throw SolverError(msg.str());
    }
  }
  return sol;
}

}  // namespace

LimitSolution solve_limit(const DensityEquation& eq, double c, Complex z,
                          const SolverSettings& settings,
                          const SolveStart& start) {
  return solve_with(
      [&](Complex s, std::size_t m) { return eq.moment(s, m); }, true,
      DensityEquation::kMaxLevel, c, z, settings, start);
}

LimitSolution solve_limit_density(const SpectralDensity& f, double c, Complex z,
                                  const SolverSettings& settings) {
  const DensityEquation eq(f);
  return solve_limit(eq, c, z, settings);
}

// ---------------------------------------------------------------------------
// H form

namespace {

// (u - log(1 + u)) / u^2
Complex log_remainder(Complex u) {
  if (std::abs(u) < 0.1) {
    Complex acc{};
    Complex power(1.0, 0.0);
    for (int n = 0; n < 24; ++n) {
      acc += (n % 2 == 0 ? 1.0 : -1.0) * power / static_cast<double>(n + 2);
      power *= u;
    }
    return acc;
  }
  return (u - std::log(1.0 + u)) / (u * u);
}

Complex h_moment(const HMeasure& h, Complex s) {
  Complex acc{};
  for (const Atom& a : h.atoms) acc += a.mass * a.location / (1.0 + a.location * s);
  if (!h.x.empty() && h.cell_mass[0] > 0.0) {
    acc += h.cell_mass[0] * h.x[0] / (1.0 + h.x[0] * s);
  }
  for (std::size_t i = 1; i < h.x.size(); ++i) {
    const double mass = h.cell_mass[i];
    if (mass == 0.0) continue;
    const double x0 = h.x[i - 1];
    const double dx = h.x[i] - x0;
    const Complex u0 = 1.0 + x0 * s;
    const Complex v = s * dx / u0;
    acc += mass * (x0 / u0 + dx * log_remainder(v) / (u0 * u0));
  }
  if (h.tail_mass > 0.0) acc += h.tail_mass / s;
  return acc;
}

}  // namespace

HMeasure point_mass(double location) {
  if (!(location >= 0.0) || !std::isfinite(location)) {
    throw DomainError("point mass location must be finite and nonnegative");
  }
  HMeasure h;
  h.atoms.push_back({location, 1.0});
  return h;
}

HMeasure h_measure(const Pushforward& p) {
  if (p.x.empty() || p.x.size() != p.cdf.size()) {
    throw ShapeError("pushforward grid and cdf must be nonempty and equal length");
  }
  HMeasure h;
  h.atoms = p.atoms;
  h.x = p.x;
  h.cell_mass.assign(p.x.size(), 0.0);
  const auto atoms_in = [&](double lo, double hi) {
    double m = 0.0;
    for (const Atom& a : p.atoms) {
      if (a.location > lo && a.location <= hi) m += a.mass;
    }
    return m;
  };
  const double neg_inf = -std::numeric_limits<double>::infinity();
  h.cell_mass[0] = std::max(0.0, p.cdf[0] - atoms_in(neg_inf, p.x[0]));
  for (std::size_t i = 1; i < p.x.size(); ++i) {
    h.cell_mass[i] = std::max(
        0.0, p.cdf[i] - p.cdf[i - 1] - atoms_in(p.x[i - 1], p.x[i]));
  }
  h.tail_mass = std::max(
      0.0, 1.0 - p.cdf.back() -
               atoms_in(p.x.back(), std::numeric_limits<double>::infinity()));
  return h;
}

LimitSolution solve_limit_H(const HMeasure& h, double c, Complex z,
                            const SolverSettings& settings,
                            const SolveStart& start) {
  const auto moment = [&](Complex s, std::size_t) {
    const double step = 1e-6 * std::abs(s);
    const Complex j = h_moment(h, s);
    const Complex dj = (h_moment(h, s + step) - h_moment(h, s - step)) / (2.0 * step);
    return std::pair<Complex, Complex>{j, dj};
  };
  return solve_with(moment, false, 0, c, z, settings, start);
}

LimitSolution solve_limit_H(const Pushforward& h, double c, Complex z,
                            const SolverSettings& settings) {
  return solve_limit_H(h_measure(h), c, z, settings);
}

// ---------------------------------------------------------------------------
// Inversion

double LimitDistribution::continuous_mass() const {
  return cdf.empty() ? 0.0 : cdf.back() - atom0;
}

StepCdf LimitDistribution::to_cdf() const {
  std::vector<double> xs;
  std::vector<double> vs;
  if (x.empty() || x.front() > 0.0) {
    xs.push_back(0.0);
    vs.push_back(atom0);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    xs.push_back(x[i]);
    vs.push_back(std::min(1.0, std::max(vs.empty() ? 0.0 : vs.back(), cdf[i])));
  }
  return StepCdf::from_grid(xs, vs);
}

namespace {

struct PointEstimate {
  double rho = 0.0;
  std::vector<LimitSolution> ladder;
  bool unstable = false;
};

class Inverter {
 public:
  Inverter(const SpectralDensity& f, double c, std::span<const double> eps,
           const SolverSettings& st, const InversionOptions& opt)
      : eq_(f), c_(c), eps_(eps.begin(), eps.end()), st_(st), opt_(opt),
        atom0_(std::max(0.0, 1.0 - 1.0 / c)) {
    quiet_ = st;
    quiet_.probe_uniqueness = false;
  }

  // `fine` divides the ladder by `factor` (used inside edge windows).
  PointEstimate at(double x, const PointEstimate* warm, double factor = 1.0) {
    PointEstimate out;
    const double scale = std::min(1.0, x / opt_.ladder_scale_below) / factor;
    std::vector<double> rho;
    for (std::size_t j = 0; j < eps_.size(); ++j) {
      const Complex z(x, eps_[j] * scale);
      SolveStart start;
      const LimitSolution* prior = nullptr;
      if (j > 0) {
        prior = &out.ladder[j - 1];
      } else if (warm != nullptr) {
        prior = &warm->ladder[0];
      }
      if (prior != nullptr) {
        start.s_under = prior->s_under;
        start.level = prior->level;
      }
      const SolverSettings& st = (j == 0 && st_.probe_uniqueness) ? st_ : quiet_;
      LimitSolution sol = solve_limit(eq_, c_, z, st, start);
      max_residual = std::max(max_residual, sol.residual);
      max_certified = std::max(max_certified, sol.certified_residual);
      ++solves;
      rho.push_back((sol.s + atom0_ / z).imag() / kPi);
      out.ladder.push_back(sol);
    }
    const std::size_t n = eps_.size();
    const double e1 = eps_[n - 2];
    const double e2 = eps_[n - 1];
    const double r1 = rho[n - 2];
    const double r2 = rho[n - 1];
    out.rho = std::max(0.0, (e1 * r2 - e2 * r1) / (e1 - e2));
    const double big = std::max(std::abs(r1), std::abs(r2));
    out.unstable = big > opt_.edge_threshold &&
                   std::abs(r2 - r1) > opt_.instability * big;
    return out;
  }

  double atom0() const { return atom0_; }
  double finest(double x) const {
    return eps_.back() * std::min(1.0, x / opt_.ladder_scale_below);
  }

  double max_residual = 0.0;
  double max_certified = 0.0;
  std::size_t solves = 0;

 private:
  DensityEquation eq_;
  double c_;
  std::vector<double> eps_;
  SolverSettings st_;
  SolverSettings quiet_;
  InversionOptions opt_;
  double atom0_;
};

}  // namespace

LimitDistribution invert_to_distribution(const SpectralDensity& f, double c,
                                         std::span<const double> x_grid,
                                         std::span<const double> eps_ladder,
                                         const SolverSettings& settings,
                                         const InversionOptions& options) {
  settings.validate();
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("aspect ratio c must be positive");
  }
  if (x_grid.empty()) throw DomainError("x grid must be nonempty");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0) || !std::isfinite(x_grid[i])) {
      throw DomainError("x grid values must be positive and finite");
    }
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
      throw DomainError("x grid must be strictly increasing");
    }
  }
  if (eps_ladder.size() < 2) throw DomainError("eps ladder needs two or more rungs");
  for (std::size_t j = 0; j < eps_ladder.size(); ++j) {
    if (!(eps_ladder[j] > 0.0) || (j > 0 && !(eps_ladder[j] < eps_ladder[j - 1]))) {
      throw DomainError("eps ladder must be positive and strictly decreasing");
    }
  }
  if (options.edge_refine < 1) throw DomainError("edge_refine must be at least 1");

  Inverter inv(f, c, eps_ladder, settings, options);
  std::vector<double> xs(x_grid.begin(), x_grid.end());
  // Sweep from the right so that a hard edge at 0 is approached through warm
  // starts from larger x.
  std::vector<PointEstimate> est(xs.size());
  for (std::size_t i = xs.size(); i-- > 0;) {
    est[i] = inv.at(xs[i], i + 1 < xs.size() ? &est[i + 1] : nullptr);
  }

  // Around each threshold crossing, re-evaluate a window with the grid and
  // the eps ladder both refined by edge_refine: the square-root edge leaves an
  // O(eps^1.2) smear that the coarse ladder cannot remove.
  const double thr = options.edge_threshold;
  const auto above = [&](const PointEstimate& pe) { return pe.rho >= thr; };
  std::vector<std::pair<double, double>> windows;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (above(est[i]) == above(est[i + 1])) continue;
    const double cell = xs[i + 1] - xs[i];
    const double reach = 3.0 * cell + 8.0 * inv.finest(xs[i]);
    const double lo = xs[i] - reach;
    const double hi = xs[i + 1] + reach;
    if (!windows.empty() && lo <= windows.back().second) {
      windows.back().second = std::max(windows.back().second, hi);
    } else {
      windows.emplace_back(lo, hi);
    }
  }
  const double factor = options.edge_refine;
  std::vector<double> rx;
  std::vector<PointEstimate> rest;
  std::size_t w = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (w < windows.size() && windows[w].second < xs[i]) ++w;
    const bool inside = w < windows.size() && xs[i] >= windows[w].first;
    if (!inside) {
      rx.push_back(xs[i]);
      rest.push_back(est[i]);
      continue;
    }
    const PointEstimate* warm = rest.empty() ? nullptr : &rest.back();
    rx.push_back(xs[i]);
    rest.push_back(inv.at(xs[i], warm, factor));
    const bool next_inside = i + 1 < xs.size() && xs[i + 1] <= windows[w].second;
    if (!next_inside) continue;
    const double step = (xs[i + 1] - xs[i]) / options.edge_refine;
    for (int k = 1; k < options.edge_refine; ++k) {
      const double x = xs[i] + step * k;
      PointEstimate pe = inv.at(x, &rest.back(), factor);
      rx.push_back(x);
      rest.push_back(std::move(pe));
    }
  }
  std::vector<double> edges;
  for (std::size_t i = 0; i + 1 < rx.size(); ++i) {
    if (above(rest[i]) == above(rest[i + 1])) continue;
    const double t = (thr - rest[i].rho) / (rest[i + 1].rho - rest[i].rho);
    edges.push_back(rx[i] + t * (rx[i + 1] - rx[i]));
  }

  LimitDistribution out;
  out.c = c;
  out.atom0 = inv.atom0();
  out.x = std::move(rx);
  out.density.reserve(out.x.size());
  for (const PointEstimate& pe : rest) {
    out.density.push_back(pe.rho);
    if (pe.unstable) out.unstable_x.push_back(out.x[out.density.size() - 1]);
  }
  out.cdf.resize(out.x.size());
  out.cdf[0] = out.atom0;
  for (std::size_t i = 1; i < out.x.size(); ++i) {
    out.cdf[i] = out.cdf[i - 1] + 0.5 * (out.density[i - 1] + out.density[i]) *
                                      (out.x[i] - out.x[i - 1]);
  }
  out.edges = std::move(edges);
  out.max_residual = inv.max_residual;
  out.max_certified_residual = inv.max_certified;
  out.solves = inv.solves;
  return out;
}

std::vector<double> auto_x_grid(const SpectralDensity& f, double c,
                                std::size_t bulk_points) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("aspect ratio c must be positive");
  }
  if (bulk_points < 8) throw DomainError("bulk_points must be at least 8");
  constexpr std::size_t kScan = 1 << 16;
  std::vector<double> v(kScan);
  for (std::size_t i = 0; i < kScan; ++i) {
    const double lam = kPi * (static_cast<double>(i) + 0.5) / kScan;
    v[i] = kTwoPi * f.eval_unchecked(lam);
  }
  std::sort(v.begin(), v.end());
  const double hmin = v.front();
  const double median = std::max(v[kScan / 2], 1e-12);
  const double hmax = f.bounded() ? kTwoPi * f.supremum()
                                  : v[static_cast<std::size_t>(0.999 * kScan)];
  const double sc = std::sqrt(c);
  const double lo_edge = hmin * (1.0 - sc) * (1.0 - sc);
  const double upper = hmax * (1.0 + sc) * (1.0 + sc) * 1.15 + 0.05 * median;
  const bool hard = lo_edge < 1e-3 * median;

  std::vector<double> grid;
  double bulk_lo = 0.8 * lo_edge;
  if (hard) {
    bulk_lo = 0.02 * median;
    for (double x = 1e-8; x < bulk_lo; x *= std::pow(10.0, 0.05)) grid.push_back(x);
  }
  const double u0 = std::asinh(bulk_lo / median);
  const double u1 = std::asinh(upper / median);
  for (std::size_t i = 0; i < bulk_points; ++i) {
    const double u = u0 + (u1 - u0) * static_cast<double>(i) / (bulk_points - 1);
    grid.push_back(median * std::sinh(u));
  }
  if (!f.bounded()) {
    const double ratio = std::pow(20.0, 1.0 / 100.0);
    double x = upper;
    for (int i = 0; i < 100; ++i) {
      x *= ratio;
      grid.push_back(x);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(),
                            [](double x) { return !(x > 0.0); }),
             grid.end());
  return grid;
}

TruncationLadder truncation_ladder(const SpectralDensity& f, double c,
                                   std::span<const double> b_list,
                                   std::span<const double> x_grid,
                                   const SolverSettings& settings,
                                   std::span<const double> eps_ladder) {
  if (b_list.empty()) throw DomainError("truncation ladder needs at least one level");
  for (std::size_t i = 0; i < b_list.size(); ++i) {
    if (!(b_list[i] > 0.0) || (i > 0 && !(b_list[i] > b_list[i - 1]))) {
      throw DomainError("truncation levels must be positive and increasing");
    }
  }
  TruncationLadder out;
  out.b.assign(b_list.begin(), b_list.end());
  for (double b : b_list) {
    const SpectralDensity fb = truncate_density(f, b);
    out.masses.push_back(covariance_from_density(fb, 0));
    out.limits.push_back(invert_to_distribution(fb, c, x_grid, eps_ladder, settings));
  }
  for (std::size_t i = 0; i + 1 < out.limits.size(); ++i) {
    out.gaps.push_back(
        levy_distance(out.limits[i].to_cdf(), out.limits[i + 1].to_cdf()));
  }
  return out;
}

}  // namespace gramlimit
