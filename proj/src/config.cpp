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

#include "gramlimit/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace gramlimit {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& msg) { errors_.push_back(msg); }

  const json* child(const json& obj, std::string_view key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(std::string(key));
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  void allow(const json& obj, const std::string& path,
             std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
        error("unknown key '" + prefixed(path, it.key()) + "'");
      }
    }
  }

  double number(const json& obj, std::string_view key, const std::string& path,
                double fallback) {
    const json* v = child(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) {
      error(prefixed(path, key) + " must be a number");
      return fallback;
    }
    return v->get<double>();
  }

  long long integer(const json& obj, std::string_view key, const std::string& path,
                    long long fallback) {
    const json* v = child(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) {
      error(prefixed(path, key) + " must be an integer");
      return fallback;
    }
    return v->get<long long>();
  }

  bool boolean(const json& obj, std::string_view key, const std::string& path,
               bool fallback) {
    const json* v = child(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) {
      error(prefixed(path, key) + " must be true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string text(const json& obj, std::string_view key, const std::string& path,
                   const std::string& fallback) {
    const json* v = child(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) {
      error(prefixed(path, key) + " must be a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const json& obj, std::string_view key,
                              const std::string& path, std::vector<double> fallback) {
    const json* v = child(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) {
      error(prefixed(path, key) + " must be a list of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const json& e : *v) {
      if (!e.is_number()) {
        error(prefixed(path, key) + " must be a list of numbers");
        return fallback;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<long long> integers(const json& obj, std::string_view key,
                                  const std::string& path,
                                  std::vector<long long> fallback) {
    const json* v = child(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) {
      error(prefixed(path, key) + " must be a list of integers");
      return fallback;
    }
    std::vector<long long> out;
    for (const json& e : *v) {
      if (!e.is_number_integer()) {
        error(prefixed(path, key) + " must be a list of integers");
        return fallback;
      }
      out.push_back(e.get<long long>());
    }
    return out;
  }

  static std::string prefixed(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

 private:
  std::vector<std::string>& errors_;
};

bool increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

// Exact rational for values like 0.5 or 0.25 (denominator up to 10^6).
std::optional<Rational> to_rational(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
  for (std::int64_t den = 1; den <= 1000000; ++den) {
    const double num = std::round(v * static_cast<double>(den));
    if (num >= 1.0 && std::abs(num / static_cast<double>(den) - v) <= 1e-12 * v) {
      const auto n = static_cast<std::int64_t>(num);
      const std::int64_t g = std::gcd(n, den);
      return Rational{n / g, den / g};
    }
  }
  return std::nullopt;
}

std::optional<Rational> parse_rational(const json& v) {
  if (v.is_number()) return to_rational(v.get<double>());
  if (!v.is_string()) return std::nullopt;
  const std::string s = v.get<std::string>();
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return to_rational(std::stod(s));
    std::size_t used = 0;
    const long long num = std::stoll(s.substr(0, slash), &used);
    const long long den = std::stoll(s.substr(slash + 1));
    if (num <= 0 || den <= 0) return std::nullopt;
    const long long g = std::gcd(num, den);
    return Rational{num / g, den / g};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<SpectralDensity> read_density(Reader& r, const json& root,
                                            json& canon) {
  const json empty = json::object();
  const json* node = r.child(root, "density");
  const json& d = node ? *node : empty;
  if (node && !node->is_object()) {
    r.error("density must be an object");
    return std::nullopt;
  }
  const std::string family = r.text(d, "family", "density", "constant");
  const double sigma2 = r.number(d, "sigma2", "density", 1.0);
  std::optional<double> truncate;
  if (r.child(d, "truncate")) truncate = r.number(d, "truncate", "density", 0.0);
  canon = json{{"family", family}};
  std::vector<std::string> local;
  if (family != "tabulated" && !(sigma2 > 0.0 && std::isfinite(sigma2))) {
    local.emplace_back("sigma2 must be positive");
  }
  if (truncate && !(*truncate > 0.0 && std::isfinite(*truncate))) {
    local.emplace_back("truncation level b must be positive");
  }
  std::function<SpectralDensity()> build;
  if (family == "constant") {
    r.allow(d, "density", {"family", "sigma2", "truncate"});
    canon["sigma2"] = sigma2;
    build = [=] { return SpectralDensity::constant(sigma2); };
  } else if (family == "ar1") {
    r.allow(d, "density", {"family", "sigma2", "phi", "truncate"});
    const double phi = r.number(d, "phi", "density", 0.5);
    if (!(std::abs(phi) < 1.0)) local.emplace_back("phi must lie in (-1, 1)");
    canon["sigma2"] = sigma2;
    canon["phi"] = phi;
    build = [=] { return SpectralDensity::ar1(phi, sigma2); };
  } else if (family == "ma1") {
    r.allow(d, "density", {"family", "sigma2", "theta", "truncate"});
    const double theta = r.number(d, "theta", "density", 0.5);
    if (!std::isfinite(theta)) local.emplace_back("theta must be finite");
    canon["sigma2"] = sigma2;
    canon["theta"] = theta;
    build = [=] { return SpectralDensity::ma1(theta, sigma2); };
  } else if (family == "fractional") {
    r.allow(d, "density", {"family", "sigma2", "d", "truncate"});
    const double dd = r.number(d, "d", "density", 0.3);
    if (!(dd > 0.0 && dd < 0.5)) local.emplace_back("d must lie in (0, 1/2)");
    canon["sigma2"] = sigma2;
    canon["d"] = dd;
    build = [=] { return SpectralDensity::fractional(dd, sigma2); };
  } else if (family == "tabulated") {
    r.allow(d, "density", {"family", "table", "truncate"});
    const std::string table = r.text(d, "table", "density", "");
    if (table.empty()) local.emplace_back("tabulated density needs density.table");
    canon["table"] = table;
    build = [=] { return SpectralDensity::load_tabulated(table); };
  } else {
    r.error("density.family '" + family +
            "' is not one of constant, ar1, ma1, fractional, tabulated");
    return std::nullopt;
  }
  if (truncate) canon["truncate"] = *truncate;
  for (const auto& e : local) r.error("density: " + e);
  if (!local.empty()) return std::nullopt;
  try {
    SpectralDensity f = build();
    if (truncate) f = truncate_density(f, *truncate);
    if (family == "tabulated") canon["params_hash"] = f.param("hash");
    return f;
  } catch (const Error& e) {
    r.error(std::string("density: ") + e.what());
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kSolve: return "solve";
    case Command::kSimulate: return "simulate";
    case Command::kCompare: return "compare";
    case Command::kToeplitz: return "toeplitz";
    case Command::kUniversality: return "universality";
    case Command::kTruncation: return "truncation";
  }
  return "solve";
}

std::optional<Command> command_from_string(std::string_view name) {
  for (Command c : {Command::kSolve, Command::kSimulate, Command::kCompare,
                    Command::kToeplitz, Command::kUniversality, Command::kTruncation}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error("invalid config: " + join(errors)), errors_(std::move(errors)) {}

std::vector<double> ExperimentConfig::resolve_x_grid(double aspect) const {
  if (!x_grid.empty()) return x_grid;
  return auto_x_grid(density, aspect, x_points);
}

ExperimentConfig parse_config(std::string_view text) {
  json tree;
  try {
    tree = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError({"parse error at line " + std::to_string(line) + ", column " +
                       std::to_string(col) + ": " + e.what()});
  }
  return parse_config(tree);
}

ExperimentConfig parse_config(const json& tree) {
  std::vector<std::string> errors;
  Reader r(errors);
  if (!tree.is_object()) throw ConfigError({"config must be a JSON object"});
  r.allow(tree, "",
          {"command", "density", "c", "sizes", "n", "toeplitz", "truncation", "ensemble",
           "solver", "grids", "seeds", "thresholds", "output_dir", "cache_dir",
           "emit_plots", "export_csv", "workers"});

  ExperimentConfig cfg;
  json canon = json::object();

  const std::string command = r.text(tree, "command", "", "solve");
  if (auto c = command_from_string(command)) {
    cfg.command = *c;
  } else {
    r.error("command '" + command +
            "' is not one of solve, simulate, compare, toeplitz, universality, truncation");
  }
  canon["command"] = std::string(to_string(cfg.command));

  json density_canon;
  const auto density = read_density(r, tree, density_canon);
  if (density) cfg.density = *density;
  canon["density"] = density_canon;

  if (const json* c = r.child(tree, "c")) {
    if (auto q = parse_rational(*c)) {
      cfg.c = *q;
    } else {
      r.error("c must be a positive number or a ratio 'p/N'");
    }
  }
  canon["c"] = cfg.c.str();

  // (N, p) ladder.
  const json empty = json::object();
  if (const json* sizes = r.child(tree, "sizes")) {
    bool ok = sizes->is_array();
    if (ok) {
      for (const json& e : *sizes) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer() || e[0].get<long long>() < 1 ||
            e[1].get<long long>() < 1) {
          ok = false;
          break;
        }
        cfg.sizes.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
      }
    }
    if (!ok || cfg.sizes.empty()) {
      r.error("sizes must be a nonempty list of [N, p] pairs of positive integers");
      cfg.sizes.clear();
    }
    if (r.child(tree, "n")) r.error("give either sizes or n, not both");
  } else {
    const auto ns = r.integers(tree, "n", "", {200, 400, 800});
    for (long long n : ns) {
      if (n < 1) {
        r.error("n values must be positive");
        continue;
      }
      const long long scaled = n * cfg.c.num;
      if (scaled % cfg.c.den != 0) {
        r.error("n = " + std::to_string(n) + " gives a non-integer p for c = " +
                cfg.c.str());
        continue;
      }
      cfg.sizes.emplace_back(static_cast<std::size_t>(n),
                             static_cast<std::size_t>(scaled / cfg.c.den));
    }
  }
  std::sort(cfg.sizes.begin(), cfg.sizes.end());
  json sizes_canon = json::array();
  for (const auto& [n, p] : cfg.sizes) sizes_canon.push_back({n, p});
  canon["sizes"] = sizes_canon;

  {
    const json* t = r.child(tree, "toeplitz");
    const json& tj = t ? *t : empty;
    r.allow(tj, "toeplitz", {"p"});
    for (long long p : r.integers(tj, "p", "toeplitz", {100, 400, 1000})) {
      if (p < 1) {
        r.error("toeplitz.p values must be positive");
      } else {
        cfg.toeplitz_p.push_back(static_cast<std::size_t>(p));
      }
    }
    std::sort(cfg.toeplitz_p.begin(), cfg.toeplitz_p.end());
    canon["toeplitz"] = {{"p", cfg.toeplitz_p}};
  }
  {
    const json* t = r.child(tree, "truncation");
    const json& tj = t ? *t : empty;
    r.allow(tj, "truncation", {"b"});
    cfg.truncation_b = r.numbers(tj, "b", "truncation", {2, 4, 8, 16, 32});
    if (cfg.truncation_b.empty() || !increasing(cfg.truncation_b) ||
        !(cfg.truncation_b.front() > 0.0)) {
      r.error("truncation.b must be a nonempty increasing list of positive levels");
    }
    canon["truncation"] = {{"b", cfg.truncation_b}};
  }
  {
    const json* e = r.child(tree, "ensemble");
    const json& ej = e ? *e : empty;
    r.allow(ej, "ensemble",
            {"source", "innovation", "reference_innovation", "nu", "tail_tol",
             "max_half_width"});
    const std::string source = r.text(ej, "source", "ensemble", "gaussian_density");
    if (source == "gaussian_density") {
      cfg.ensemble.source = RowSource::kGaussianDensity;
    } else if (source == "filter") {
      cfg.ensemble.source = RowSource::kFilter;
    } else if (source == "causal_filter") {
      cfg.ensemble.source = RowSource::kCausalFilter;
    } else if (source == "toeplitz") {
      cfg.ensemble.source = RowSource::kToeplitz;
    } else {
      r.error("ensemble.source '" + source +
              "' is not one of gaussian_density, filter, causal_filter, toeplitz");
    }
    cfg.ensemble.innovation = r.text(ej, "innovation", "ensemble", "gaussian");
    cfg.ensemble.reference_innovation =
        r.text(ej, "reference_innovation", "ensemble", "gaussian");
    cfg.ensemble.nu = r.number(ej, "nu", "ensemble", 0.0);
    for (const std::string* law :
         {&cfg.ensemble.innovation, &cfg.ensemble.reference_innovation}) {
      try {
        (void)InnovationLaw::parse(*law, cfg.ensemble.nu);
      } catch (const Error& ex) {
        r.error(std::string("ensemble: ") + ex.what());
      }
    }
    cfg.ensemble.tail_tol = r.number(ej, "tail_tol", "ensemble", 1e-6);
    if (!(cfg.ensemble.tail_tol > 0.0)) r.error("ensemble.tail_tol must be positive");
    const long long width = r.integer(ej, "max_half_width", "ensemble", 8192);
    if (width < 16) r.error("ensemble.max_half_width must be at least 16");
    cfg.ensemble.max_half_width = static_cast<std::size_t>(std::max(width, 16LL));
    canon["ensemble"] = {{"source", source},
                         {"innovation", cfg.ensemble.innovation},
                         {"reference_innovation", cfg.ensemble.reference_innovation},
                         {"nu", cfg.ensemble.nu},
                         {"tail_tol", cfg.ensemble.tail_tol},
                         {"max_half_width", cfg.ensemble.max_half_width}};
  }
  {
    const json* s = r.child(tree, "solver");
    const json& sj = s ? *s : empty;
    r.allow(sj, "solver", {"tol", "max_iter", "damping", "quad_tol", "probe_uniqueness"});
    SolverSettings& st = cfg.solver;
    st.tol = r.number(sj, "tol", "solver", st.tol);
    st.max_iter = static_cast<int>(r.integer(sj, "max_iter", "solver", st.max_iter));
    st.damping = r.number(sj, "damping", "solver", st.damping);
    st.quad_tol = r.number(sj, "quad_tol", "solver", st.quad_tol);
    st.probe_uniqueness = r.boolean(sj, "probe_uniqueness", "solver", false);
    try {
      st.validate();
    } catch (const DomainError& ex) {
      r.error(std::string("solver: ") + ex.what());
    }
    canon["solver"] = {{"tol", st.tol},
                       {"max_iter", st.max_iter},
                       {"damping", st.damping},
                       {"quad_tol", st.quad_tol},
                       {"probe_uniqueness", st.probe_uniqueness}};
  }
  {
    const json* g = r.child(tree, "grids");
    const json& gj = g ? *g : empty;
    r.allow(gj, "grids", {"x", "eps", "z"});
    json grids = json::object();
    const json* x = r.child(gj, "x");
    const json& xj = x ? *x : empty;
    r.allow(xj, "grids.x", {"points", "lo", "hi", "spacing", "values"});
    const long long points = r.integer(xj, "points", "grids.x", 600);
    if (points < 8) r.error("grids.x.points must be at least 8");
    cfg.x_points = static_cast<std::size_t>(std::max(points, 8LL));
    if (r.child(xj, "values")) {
      cfg.x_grid = r.numbers(xj, "values", "grids.x", {});
    } else if (r.child(xj, "lo") || r.child(xj, "hi")) {
      const double lo = r.number(xj, "lo", "grids.x", 0.0);
      const double hi = r.number(xj, "hi", "grids.x", 0.0);
      const std::string spacing = r.text(xj, "spacing", "grids.x", "linear");
      if (!(lo > 0.0 && hi > lo)) {
        r.error("grids.x needs 0 < lo < hi");
      } else if (spacing == "linear" || spacing == "log") {
        for (std::size_t i = 0; i < cfg.x_points; ++i) {
          const double t = static_cast<double>(i) / static_cast<double>(cfg.x_points - 1);
          cfg.x_grid.push_back(spacing == "linear" ? lo + t * (hi - lo)
                                                   : lo * std::pow(hi / lo, t));
        }
      } else {
        r.error("grids.x.spacing must be linear or log");
      }
    }
    if (!cfg.x_grid.empty() &&
        (!increasing(cfg.x_grid) || !(cfg.x_grid.front() > 0.0))) {
      r.error("grids.x values must be positive and strictly increasing");
    }
    if (cfg.x_grid.empty()) {
      grids["x"] = {{"auto", true}, {"points", cfg.x_points}};
    } else {
      grids["x"] = {{"values", cfg.x_grid}};
    }
    cfg.eps_ladder = r.numbers(gj, "eps", "grids", default_eps_ladder());
    bool eps_ok = cfg.eps_ladder.size() >= 2;
    for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
      if (!(cfg.eps_ladder[i] > 0.0) ||
          (i > 0 && !(cfg.eps_ladder[i] < cfg.eps_ladder[i - 1]))) {
        eps_ok = false;
      }
    }
    if (!eps_ok) r.error("grids.eps must list two or more positive, decreasing values");
    grids["eps"] = cfg.eps_ladder;
    const json* z = r.child(gj, "z");
    const json& zj = z ? *z : empty;
    r.allow(zj, "grids.z", {"re", "im", "values"});
    if (const json* values = r.child(zj, "values")) {
      bool ok = values->is_array() && !values->empty();
      if (ok) {
        for (const json& e : *values) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            ok = false;
            break;
          }
          cfg.z_grid.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
      }
      if (!ok) r.error("grids.z.values must be a nonempty list of [re, im] pairs");
    } else {
      const auto re = r.numbers(zj, "re", "grids.z", {0.25, 0.5, 1.0, 2.0, 3.0, 4.0});
      const auto im = r.numbers(zj, "im", "grids.z", {0.1, 1.0});
      for (double b : im) {
        for (double a : re) cfg.z_grid.emplace_back(a, b);
      }
    }
    json zs = json::array();
    for (const Complex& v : cfg.z_grid) {
      if (!(v.imag() > 0.0)) {
        r.error("grids.z points must have positive imaginary part");
        break;
      }
      zs.push_back({v.real(), v.imag()});
    }
    grids["z"] = zs;
    canon["grids"] = grids;
  }
  {
    for (long long s : r.integers(tree, "seeds", "", {1, 2, 3, 4, 5})) {
      if (s < 0) {
        r.error("seeds must be nonnegative");
      } else {
        cfg.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    }
    if (cfg.seeds.empty()) r.error("seeds must be a nonempty list");
    const std::set<std::uint64_t> unique(cfg.seeds.begin(), cfg.seeds.end());
    if (unique.size() != cfg.seeds.size()) r.error("seeds must be distinct");
    canon["seeds"] = cfg.seeds;
  }
  {
    const json* t = r.child(tree, "thresholds");
    const json& tj = t ? *t : empty;
    r.allow(tj, "thresholds",
            {"metric", "compare", "universality", "toeplitz", "ladder", "require_decreasing"});
    Thresholds& th = cfg.thresholds;
    const bool unbounded = !cfg.density.bounded();
    const bool constant = cfg.density.family() == DensityFamily::kConstant;
    th.metric = r.text(tj, "metric", "thresholds", unbounded ? "levy" : "kolmogorov");
    if (th.metric != "levy" && th.metric != "kolmogorov") {
      r.error("thresholds.metric must be levy or kolmogorov");
    }
    th.compare = r.number(tj, "compare", "thresholds",
                          unbounded ? 0.08 : (constant ? 0.03 : 0.05));
    th.universality = r.number(tj, "universality", "thresholds", 0.05);
    th.toeplitz = r.number(tj, "toeplitz", "thresholds", 0.05);
    th.ladder = r.number(tj, "ladder", "thresholds", 0.01);
    th.require_decreasing = r.boolean(tj, "require_decreasing", "thresholds", true);
    for (double v : {th.compare, th.universality, th.toeplitz, th.ladder}) {
      if (!(v > 0.0)) {
        r.error("thresholds must be positive");
        break;
      }
    }
    canon["thresholds"] = {{"metric", th.metric},
                           {"compare", th.compare},
                           {"universality", th.universality},
                           {"toeplitz", th.toeplitz},
                           {"ladder", th.ladder},
                           {"require_decreasing", th.require_decreasing}};
  }
  cfg.output_dir = r.text(tree, "output_dir", "", "");
  cfg.cache_dir = r.text(tree, "cache_dir", "", "");
  cfg.emit_plots = r.boolean(tree, "emit_plots", "", false);
  cfg.export_csv = r.boolean(tree, "export_csv", "", false);
  const long long workers = r.integer(tree, "workers", "", 1);
  if (workers < 1 || workers > 256) r.error("workers must lie in [1, 256]");
  cfg.workers = static_cast<unsigned>(std::clamp(workers, 1LL, 256LL));
  canon["output_dir"] = cfg.output_dir;
  canon["cache_dir"] = cfg.cache_dir;
  canon["emit_plots"] = cfg.emit_plots;
  canon["export_csv"] = cfg.export_csv;
  canon["workers"] = cfg.workers;

  // Command preconditions.
  if (density && cfg.command == Command::kToeplitz && !cfg.density.bounded()) {
    r.error("toeplitz needs a bounded density; " + cfg.density.describe() +
            " is unbounded, so set density.truncate to run on f truncated at b");
  }
  if (cfg.command == Command::kUniversality && cfg.ensemble.source == RowSource::kToeplitz) {
    r.error("universality compares innovation laws and needs a filter source, not toeplitz");
  }
  if (density && cfg.ensemble.source == RowSource::kCausalFilter) {
    const auto fam = cfg.density.family();
    if (fam == DensityFamily::kTabulated || fam == DensityFamily::kTruncated) {
      r.error("ensemble.source causal_filter supports constant, ar1, ma1 and fractional only");
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  cfg.canonical = std::move(canon);
  cfg.hash = fnv1a64(cfg.canonical.dump());
  return cfg;
}

void apply_override(json& tree, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError({"override '" + std::string(assignment) + "' is not key=value"});
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  if (!tree.is_object()) tree = json::object();
  json* node = &tree;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) {
      throw ConfigError({"override key '" + key + "' has an empty component"});
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& next = (*node)[part];
    if (!next.is_object()) next = json::object();
    node = &next;
    start = dot + 1;
  }
}

}  // namespace gramlimit
