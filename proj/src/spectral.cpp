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

#include "gramlimit/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "gramlimit/quadrature.hpp"

namespace gramlimit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

// Singular points folded onto [0, pi].
std::vector<double> half_range_singular(const SpectralDensity& f) {
  std::vector<double> out;
  for (double s : f.singular_points()) out.push_back(std::abs(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PanelRule density_rule(const SpectralDensity& f, std::size_t panels) {
  const auto singular = half_range_singular(f);
  return PanelRule(0.0, kPi, f.breakpoints(), singular, panels);
}

// int_0^pi g(x) cos(kx) dx for k = 0..max_lag on one rule. Harmonics come
// from repeated rotation, re-anchored every 32 steps to bound drift.
std::vector<double> cosine_moments(const PanelRule& rule,
                                   std::span<const double> node_values,
                                   std::span<const double> sliver_values,
                                   double alpha, std::size_t max_lag) {
  std::vector<double> acc(max_lag + 1, 0.0);
  auto accumulate = [&](double x, double weighted) {
    if (weighted == 0.0) return;
    const Complex step(std::cos(x), std::sin(x));
    Complex r(1.0, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
      if (k % 32 == 0 && k > 0) {
        const double kx = static_cast<double>(k) * x;
        r = Complex(std::cos(kx), std::sin(kx));
      }
      acc[k] += weighted * r.real();
      r *= step;
    }
  };
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    accumulate(nodes[i], weights[i] * node_values[i]);
  }
  const auto slivers = rule.slivers();
  for (std::size_t i = 0; i < slivers.size(); ++i) {
    accumulate(slivers[i].node,
               slivers[i].width / (1.0 - alpha) * sliver_values[i]);
  }
  return acc;
}

// Cosine moments of `transform(f)` converged by panel doubling.
template <typename Transform>
std::vector<double> converged_moments(const SpectralDensity& f,
                                      Transform transform, double alpha,
                                      std::size_t max_lag, double tol,
                                      double scale) {
  constexpr std::size_t kMaxEvaluations = std::size_t{1} << 21;
  std::size_t panels = std::max<std::size_t>(16, 2 * max_lag);
  auto moments_at = [&](std::size_t m) {
    PanelRule rule = density_rule(f, m);
    if (rule.evaluations() > kMaxEvaluations) {
      throw QuadratureError("covariance quadrature exceeded " +
                            std::to_string(kMaxEvaluations) + " evaluations");
    }
    std::vector<double> nv(rule.nodes().size());
    for (std::size_t i = 0; i < nv.size(); ++i) {
      nv[i] = transform(f.eval_unchecked(rule.nodes()[i]));
    }
    std::vector<double> sv(rule.slivers().size());
    for (std::size_t i = 0; i < sv.size(); ++i) {
      sv[i] = transform(f.eval_unchecked(rule.slivers()[i].node));
    }
    return cosine_moments(rule, nv, sv, alpha, max_lag);
  };
  auto previous = moments_at(panels);
  for (;;) {
    panels *= 2;
    auto current = moments_at(panels);
    double worst = 0.0;
    double size = scale;
    for (std::size_t k = 0; k <= max_lag; ++k) {
      worst = std::max(worst, std::abs(current[k] - previous[k]));
      size = std::max(size, std::abs(current[k]));
    }
    if (worst <= tol * size) return current;
    previous = std::move(current);
  }
}

// Measure of {l in [0, pi] : f(l) <= level} (or < level when strict), using
// M equal cells and bisection inside each cell that straddles the level.
struct LevelScan {
  double measure = 0.0;
  std::vector<double> crossings;
};

class SampledDensity {
 public:
  explicit SampledDensity(const SpectralDensity& f, std::size_t cells = 16384)
      : f_(f), cells_(cells), step_(kPi / static_cast<double>(cells)) {
    values_.resize(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
      values_[j] = f.eval_unchecked(lambda(j));
    }
  }

  double lambda(std::size_t j) const {
    return j == cells_ ? kPi : step_ * static_cast<double>(j);
  }

  LevelScan scan(double level, bool strict) const {
    auto inside = [&](double v) { return strict ? v < level : v <= level; };
    LevelScan out;
    for (std::size_t j = 0; j < cells_; ++j) {
      const bool in_a = inside(values_[j]);
      const bool in_b = inside(values_[j + 1]);
      const double a = lambda(j);
      const double b = lambda(j + 1);
      if (in_a && in_b) {
        out.measure += b - a;
      } else if (in_a != in_b) {
        double lo = a, hi = b;  // inside(lo) == in_a
        for (int it = 0; it < 60 && hi - lo > 1e-16; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (inside(f_.eval_unchecked(mid)) == in_a) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        const double cross = 0.5 * (lo + hi);
        out.crossings.push_back(cross);
        out.measure += in_a ? cross - a : b - cross;
      }
    }
    return out;
  }

 private:
  const SpectralDensity& f_;
  std::size_t cells_;
  double step_;
  std::vector<double> values_;
};

}  // namespace

std::string_view to_string(DensityFamily family) {
  switch (family) {
    case DensityFamily::kConstant: return "constant";
    case DensityFamily::kAr1: return "ar1";
    case DensityFamily::kMa1: return "ma1";
    case DensityFamily::kFractional: return "fractional";
    case DensityFamily::kTabulated: return "tabulated";
    case DensityFamily::kTruncated: return "truncated";
  }
  return "unknown";
}

DensityFamily density_family_from_string(std::string_view name) {
  for (auto fam : {DensityFamily::kConstant, DensityFamily::kAr1,
                   DensityFamily::kMa1, DensityFamily::kFractional,
                   DensityFamily::kTabulated, DensityFamily::kTruncated}) {
    if (to_string(fam) == name) return fam;
  }
  throw DomainError("unknown density family '" + std::string(name) + "'");
}

SpectralDensity SpectralDensity::constant(double sigma2) {
  require(sigma2 > 0.0 && std::isfinite(sigma2), "sigma2 must be positive");
  SpectralDensity f;
  f.family_ = DensityFamily::kConstant;
  f.params_ = {{"sigma2", sigma2}};
  f.a_ = sigma2 / kTwoPi;
  f.supremum_ = f.a_;
  f.plateaus_ = {{f.a_, kPi}};
  return f;
}

SpectralDensity SpectralDensity::ar1(double phi, double sigma2) {
  require(std::abs(phi) < 1.0, "phi must lie in (-1, 1)");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "sigma2 must be positive");
  SpectralDensity f;
  f.family_ = DensityFamily::kAr1;
  f.params_ = {{"phi", phi}, {"sigma2", sigma2}};
  f.a_ = phi;
  f.b_ = sigma2 / kTwoPi;
  f.supremum_ = f.b_ / ((1.0 - std::abs(phi)) * (1.0 - std::abs(phi)));
  if (phi == 0.0) f.plateaus_ = {{f.b_, kPi}};
  return f;
}

SpectralDensity SpectralDensity::ma1(double theta, double sigma2) {
  require(std::isfinite(theta), "theta must be finite");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "sigma2 must be positive");
  SpectralDensity f;
  f.family_ = DensityFamily::kMa1;
  f.params_ = {{"theta", theta}, {"sigma2", sigma2}};
  f.a_ = theta;
  f.b_ = sigma2 / kTwoPi;
  f.supremum_ = f.b_ * (1.0 + std::abs(theta)) * (1.0 + std::abs(theta));
  if (theta == 0.0) f.plateaus_ = {{f.b_, kPi}};
  return f;
}

SpectralDensity SpectralDensity::fractional(double d, double sigma2) {
  require(d > 0.0 && d < 0.5, "d must lie in (0, 1/2)");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "sigma2 must be positive");
  SpectralDensity f;
  f.family_ = DensityFamily::kFractional;
  f.params_ = {{"d", d}, {"sigma2", sigma2}};
  f.a_ = d;
  f.b_ = sigma2 / kTwoPi;
  f.singular_ = {0.0};
  f.exponent_ = 2.0 * d;
  f.supremum_ = kInf;
  return f;
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> lambda,
                                           std::vector<double> values) {
  require(lambda.size() == values.size(),
          "tabulated density: column lengths differ");
  require(lambda.size() >= 2, "tabulated density needs at least two rows");
  constexpr double kSnap = 1e-9;
  require(std::abs(lambda.front()) <= kSnap,
          "tabulated density must start at lambda = 0");
  require(std::abs(lambda.back() - kPi) <= kSnap,
          "tabulated density must end at lambda = pi");
  lambda.front() = 0.0;
  lambda.back() = kPi;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    require(std::isfinite(values[i]) && values[i] >= 0.0,
            "tabulated density values must be finite and nonnegative");
    if (i > 0) {
      require(lambda[i] > lambda[i - 1],
              "tabulated lambda must be strictly increasing");
    }
  }
  SpectralDensity f;
  f.family_ = DensityFamily::kTabulated;
  std::string bytes;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    bytes += shortest(lambda[i]) + ' ' + shortest(values[i]) + '\n';
  }
  f.params_ = {{"rows", static_cast<double>(lambda.size())},
               {"hash", static_cast<double>(fnv1a64(bytes) >> 11)}};
  f.breakpoints_.assign(lambda.begin() + 1, lambda.end() - 1);
  f.supremum_ = *std::max_element(values.begin(), values.end());
  // Flat segments become plateaus, merged by level.
  for (std::size_t i = 0; i + 1 < lambda.size(); ++i) {
    if (values[i] != values[i + 1]) continue;
    const double width = lambda[i + 1] - lambda[i];
    auto it = std::find_if(f.plateaus_.begin(), f.plateaus_.end(),
                           [&](const Plateau& p) { return p.level == values[i]; });
    if (it == f.plateaus_.end()) {
      f.plateaus_.push_back({values[i], width});
    } else {
      it->measure += width;
    }
  }
  f.table_lambda_ = std::make_shared<const std::vector<double>>(std::move(lambda));
  f.table_values_ = std::make_shared<const std::vector<double>>(std::move(values));
  return f;
}

SpectralDensity SpectralDensity::load_tabulated(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open density table " + path.string());
  std::vector<double> lambda, values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double l = 0.0, v = 0.0;
    if (!(row >> l)) continue;
    if (!(row >> v)) {
      throw DomainError(path.string() + ":" + std::to_string(line_no) +
                        ": expected two columns");
    }
    lambda.push_back(l);
    values.push_back(v);
  }
  return tabulated(std::move(lambda), std::move(values));
}

double SpectralDensity::param(std::string_view name) const {
  for (const auto& [key, value] : params_) {
    if (key == name) return value;
  }
  throw DomainError("density " + describe() + " has no parameter '" +
                    std::string(name) + "'");
}

double SpectralDensity::eval_unchecked(double lambda) const {
  switch (family_) {
    case DensityFamily::kConstant:
      return a_;
    case DensityFamily::kAr1:
      return b_ / (1.0 - 2.0 * a_ * std::cos(lambda) + a_ * a_);
    case DensityFamily::kMa1:
      return b_ * (1.0 + 2.0 * a_ * std::cos(lambda) + a_ * a_);
    case DensityFamily::kFractional: {
      const double s = std::abs(2.0 * std::sin(0.5 * lambda));
      if (s == 0.0) return kInf;
      return b_ * std::pow(s, -2.0 * a_);
    }
    case DensityFamily::kTabulated: {
      const auto& xs = *table_lambda_;
      const auto& ys = *table_values_;
      const double l = std::min(std::abs(lambda), kPi);
      auto it = std::upper_bound(xs.begin(), xs.end(), l);
      if (it == xs.end()) return ys.back();
      const std::size_t j = static_cast<std::size_t>(it - xs.begin());
      const double t = (l - xs[j - 1]) / (xs[j] - xs[j - 1]);
      return ys[j - 1] + t * (ys[j] - ys[j - 1]);
    }
    case DensityFamily::kTruncated:
      return std::min(parent_->eval_unchecked(lambda), a_);
  }
  return 0.0;
}

double SpectralDensity::operator()(double lambda) const {
  if (!(lambda >= -kPi && lambda <= kPi)) {
    throw DomainError("spectral density evaluated outside [-pi, pi]: " +
                      shortest(lambda));
  }
  return eval_unchecked(lambda);
}

std::string SpectralDensity::describe() const {
  std::string out(to_string(family_));
  out += '(';
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (i) out += ',';
    out += params_[i].first + '=' + shortest(params_[i].second);
  }
  out += ')';
  if (parent_) out += " of " + parent_->describe();
  return out;
}

double eval_density(const SpectralDensity& f, double lambda) {
  return f(lambda);
}

double covariance_from_density(const SpectralDensity& f, long k, double tol) {
  // White noise: exact, so that Gamma_p is exactly sigma2 * I.
  if (f.family() == DensityFamily::kConstant) return k == 0 ? f.param("sigma2") : 0.0;
  const double kd = static_cast<double>(k);
  AdaptiveOptions opts;
  opts.breakpoints = f.breakpoints();
  opts.singular_points = half_range_singular(f);
  opts.tol = tol;
  const double alpha = f.singular_exponent();
  auto eval = [&f](double x) { return 2.0 * f.eval_unchecked(x); };
  const double c0 = adaptive_integrate(opts, eval, alpha);
  if (k == 0) return c0;
  opts.scale = c0;
  opts.initial_panels =
      std::max<std::size_t>(8, 2 * static_cast<std::size_t>(std::abs(k)));
  return adaptive_integrate(
      opts, [&](double x) { return 2.0 * f.eval_unchecked(x) * std::cos(kd * x); },
      alpha);
}

std::vector<double> covariances_from_density(const SpectralDensity& f,
                                             std::size_t max_lag, double tol) {
  if (f.family() == DensityFamily::kConstant) {
    std::vector<double> exact(max_lag + 1, 0.0);
    exact[0] = f.param("sigma2");
    return exact;
  }
  auto moments = converged_moments(
      f, [](double v) { return v; }, f.singular_exponent(), max_lag, tol, 0.0);
  for (double& m : moments) m *= 2.0;
  return moments;
}

LinearFilter::LinearFilter(std::vector<double> coeffs, std::size_t offset,
                           double tail_bound)
    : coeffs_(std::move(coeffs)), offset_(offset), tail_bound_(tail_bound) {
  if (coeffs_.empty()) throw DomainError("filter needs at least one coefficient");
  if (offset_ >= coeffs_.size()) throw DomainError("filter offset out of range");
  if (!(tail_bound_ >= 0.0)) throw DomainError("filter tail bound must be >= 0");
  for (double a : coeffs_) {
    if (!std::isfinite(a)) throw DomainError("filter coefficients must be finite");
  }
}

double LinearFilter::operator[](long k) const {
  const long idx = k + static_cast<long>(offset_);
  if (idx < 0 || idx >= static_cast<long>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<std::size_t>(idx)];
}

double LinearFilter::energy() const {
  double s = 0.0;
  for (double a : coeffs_) s += a * a;
  return s;
}

double LinearFilter::autocovariance(long h) const {
  h = std::abs(h);
  double s = 0.0;
  for (long k = min_lag(); k + h <= max_lag(); ++k) {
    s += (*this)[k] * (*this)[k + h];
  }
  return s;
}

std::string LinearFilter::describe() const {
  std::string bytes;
  for (double a : coeffs_) bytes += shortest(a) + ',';
  return "filter(lags=" + std::to_string(min_lag()) + ".." +
         std::to_string(max_lag()) + ",hash=" + std::to_string(fnv1a64(bytes)) +
         ")";
}

LinearFilter filter_from_density(const SpectralDensity& f, double tail_tol,
                                 const FilterOptions& options) {
  if (!(tail_tol > 0.0)) throw DomainError("tail_tol must be positive");
  const double c0 = covariance_from_density(f, 0, options.quad_tol);
  const double norm = 2.0 / std::sqrt(kTwoPi);
  const double alpha = 0.5 * f.singular_exponent();
  std::size_t half = 16;
  for (;;) {
    half = std::min(half, options.max_half_width);
    auto moments = converged_moments(
        f, [](double v) { return std::isinf(v) ? v : std::sqrt(v); }, alpha,
        half, options.quad_tol, std::sqrt(c0));
    double energy = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
      moments[k] *= norm;
      energy += (k == 0 ? 1.0 : 2.0) * moments[k] * moments[k];
    }
    double tail = c0 - energy;
    if (tail <= tail_tol * c0) {
      std::size_t keep = half;
      const double negligible = 1e-14 * std::sqrt(c0);
      while (keep > 0 && std::abs(moments[keep]) <= negligible) {
        tail += 2.0 * moments[keep] * moments[keep];
        --keep;
      }
      std::vector<double> coeffs(2 * keep + 1);
      for (std::size_t k = 0; k <= keep; ++k) {
        coeffs[keep + k] = moments[k];
        coeffs[keep - k] = moments[k];
      }
      return LinearFilter(std::move(coeffs), keep, std::max(tail, 0.0));
    }
    if (half >= options.max_half_width) {
      throw TailToleranceError(
          "filter tail " + shortest(tail / c0) + " * c_0 still exceeds " +
          shortest(tail_tol) + " * c_0 at half-width " +
          std::to_string(options.max_half_width) + " for " + f.describe());
    }
    half *= 2;
  }
}

LinearFilter causal_filter(const SpectralDensity& f, double tail_tol,
                           std::size_t max_length) {
  if (!(tail_tol > 0.0)) throw DomainError("tail_tol must be positive");
  double sigma = 0.0;
  switch (f.family()) {
    case DensityFamily::kConstant:
      return LinearFilter({std::sqrt(f.param("sigma2"))}, 0);
    case DensityFamily::kMa1:
      sigma = std::sqrt(f.param("sigma2"));
      return LinearFilter({sigma, sigma * f.param("theta")}, 0);
    case DensityFamily::kAr1:
    case DensityFamily::kFractional:
      sigma = std::sqrt(f.param("sigma2"));
      break;
    default:
      throw DomainError("no closed-form causal representation for " +
                        f.describe());
  }
  const double c0 = covariance_from_density(f, 0);
  const bool ar = f.family() == DensityFamily::kAr1;
  const double phi = ar ? f.param("phi") : 0.0;
  const double d = ar ? 0.0 : f.param("d");
  std::vector<double> coeffs;
  double psi = 1.0;
  double energy = 0.0;
  for (std::size_t k = 0; k < max_length; ++k) {
    if (k > 0) {
      psi *= ar ? phi : (static_cast<double>(k) - 1.0 + d) / static_cast<double>(k);
    }
    const double a = sigma * psi;
    coeffs.push_back(a);
    energy += a * a;
    if (c0 - energy <= tail_tol * c0) {
      return LinearFilter(std::move(coeffs), 0, std::max(c0 - energy, 0.0));
    }
  }
  throw TailToleranceError("causal filter for " + f.describe() +
                           " needs more than " + std::to_string(max_length) +
                           " coefficients for tail_tol " + shortest(tail_tol));
}

SpectralDensity truncate_density(const SpectralDensity& f, double b) {
  require(b > 0.0 && std::isfinite(b), "truncation level b must be positive");
  SpectralDensity g;
  g.family_ = DensityFamily::kTruncated;
  g.params_ = {{"b", b}};
  g.parent_ = std::make_shared<const SpectralDensity>(f);
  g.a_ = b;
  g.supremum_ = std::min(b, f.supremum());

  const SampledDensity sampled(f);
  const LevelScan below = sampled.scan(b, /*strict=*/true);
  g.breakpoints_ = f.breakpoints();
  g.breakpoints_.insert(g.breakpoints_.end(), below.crossings.begin(),
                        below.crossings.end());
  std::sort(g.breakpoints_.begin(), g.breakpoints_.end());
  g.breakpoints_.erase(std::unique(g.breakpoints_.begin(), g.breakpoints_.end()),
                       g.breakpoints_.end());
  for (const Plateau& p : f.plateaus()) {
    if (p.level < b) g.plateaus_.push_back(p);
  }
  const double capped = kPi - below.measure;
  if (capped > 0.0) g.plateaus_.push_back({b, capped});
  return g;
}

Pushforward h_pushforward(const SpectralDensity& f,
                          std::span<const double> x_grid) {
  if (x_grid.empty()) throw DomainError("pushforward grid is empty");
  for (double x : x_grid) {
    if (!std::isfinite(x)) throw DomainError("pushforward grid values must be finite");
  }
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) {
      throw DomainError("pushforward grid must be strictly increasing");
    }
  }
  Pushforward out;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.cdf.reserve(x_grid.size());
  const SampledDensity sampled(f);
  for (double x : x_grid) {
    const double level = x / kTwoPi;
    const double measure = x < 0.0 ? 0.0 : sampled.scan(level, false).measure;
    out.cdf.push_back(std::clamp(measure / kPi, 0.0, 1.0));
  }
  for (std::size_t i = 1; i < out.cdf.size(); ++i) {
    out.cdf[i] = std::max(out.cdf[i], out.cdf[i - 1]);
  }
  for (const Plateau& p : f.plateaus()) {
    out.atoms.push_back({kTwoPi * p.level, p.measure / kPi});
  }
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  return out;
}

double regularity_profile(const LinearFilter& filter, std::size_t m) {
  if (!filter.causal()) {
    throw DomainError(
        "regularity profile needs a causal filter (offset 0); got lags " +
        std::to_string(filter.min_lag()) + ".." + std::to_string(filter.max_lag()));
  }
  const auto a = filter.coeffs();
  double tail = 0.0;
  for (std::size_t k = a.size(); k > m; --k) tail += a[k - 1] * a[k - 1];
  return std::sqrt(tail);
}

}  // namespace gramlimit
