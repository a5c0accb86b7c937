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

#include "gramlimit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <numeric>
#include <set>

#include "gramlimit/ensemble.hpp"
#include "gramlimit/io.hpp"
#include "gramlimit/matrixops.hpp"
#include "gramlimit/metrics.hpp"
#include "gramlimit/parallel.hpp"
#include "gramlimit/report.hpp"

#ifndef GRAMLIMIT_VERSION
#define GRAMLIMIT_VERSION "0.0.0"
#endif

namespace gramlimit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reference ensembles in universality runs draw from a disjoint seed stream.
constexpr std::uint64_t kReferenceStream = 0x9e3779b97f4a7c15ULL;

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string tag(double v) {
  std::string s = format_double(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::string tag(const Rational& c) {
  return std::to_string(c.num) + "_" + std::to_string(c.den);
}

std::string size_tag(std::size_t n, std::size_t p, std::uint64_t seed) {
  return "N" + std::to_string(n) + "_p" + std::to_string(p) + "_seed" + std::to_string(seed);
}

Rational ratio(std::size_t n, std::size_t p) {
  const auto g = std::gcd(static_cast<std::int64_t>(p), static_cast<std::int64_t>(n));
  return {static_cast<std::int64_t>(p) / g, static_cast<std::int64_t>(n) / g};
}

class Workspace {
 public:
  Workspace(const ExperimentConfig& cfg, const RunOptions& opt)
      : cfg_(cfg), log_(opt.log) {
    fs::path out = cfg.output_dir.empty()
                       ? fs::path(std::string(to_string(cfg.command)) + "-" +
                                  hex(cfg.hash).substr(0, 8))
                       : fs::path(cfg.output_dir);
    target_ = out.is_absolute() ? out : opt.output_root / out;
    staging_ = target_.parent_path() / ("." + target_.filename().string() + ".staging");
    if (cfg.cache_dir != "off") {
      const fs::path cache = cfg.cache_dir.empty() ? fs::path("cache") : fs::path(cfg.cache_dir);
      cache_ = cache.is_absolute() ? cache : opt.output_root / cache;
    }
    fs::remove_all(staging_);
    fs::create_directories(staging_);
    m_.command = std::string(to_string(cfg.command));
    m_.config_hash = cfg.hash;
    m_.version = GRAMLIMIT_VERSION;
    m_.seeds = cfg.seeds;
    m_.output_dir = target_;
  }

  template <typename F>
  auto stage(const std::string& name, F&& f) {
    stage_ = name;
    say("[" + name + "]");
    const auto t0 = std::chrono::steady_clock::now();
    struct Timer {
      Workspace* ws;
      std::string name;
      std::chrono::steady_clock::time_point t0;
      ~Timer() {
        ws->m_.timings.emplace_back(
            name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
    } timer{this, name, t0};
    return f();
  }

  fs::path file(const std::string& name) {
    artifacts_.insert(name);
    return staging_ / name;
  }
  void text(const std::string& name, const std::string& bytes) {
    write_file_atomic(file(name), bytes);
  }
  void check(std::string name, double value, double threshold, bool pass) {
    say("check " + name + ": " + format_double(value) + " vs " + format_double(threshold) +
        (pass ? " pass" : " FAIL"));
    m_.checks.push_back({std::move(name), value, threshold, pass});
  }
  void say(const std::string& line) {
    if (log_ != nullptr) *log_ << line << "\n" << std::flush;
  }

  const fs::path& cache() const { return cache_; }
  json& summary() { return m_.summary; }

  RunManifest commit() {
    m_.status = "pass";
    for (const Check& c : m_.checks) {
      if (!c.pass) m_.status = "fail";
    }
    std::uint64_t h = fnv1a64("");
    for (const std::string& name : artifacts_) {
      m_.artifacts.push_back(name);
      h = fnv1a64(name, h);
      h = fnv1a64(std::string_view("\0", 1), h);
      h = fnv1a64(read_file(staging_ / name), h);
    }
    m_.artifact_hash = h;
    write_json(staging_ / "manifest.json", m_.to_json());
    publish();
    return m_;
  }

  RunManifest fail(const std::string& what) {
    m_.status = "error";
    m_.failure_stage = stage_;
    m_.error = what;
    say("error in stage " + stage_ + ": " + what);
    fs::remove_all(staging_);
    fs::create_directories(staging_);
    write_json(staging_ / "manifest.json", m_.to_json());
    publish();
    return m_;
  }

 private:
  void publish() {
    const fs::path old = target_.parent_path() / ("." + target_.filename().string() + ".old");
    fs::remove_all(old);
    if (fs::exists(target_)) fs::rename(target_, old);
    fs::rename(staging_, target_);
    fs::remove_all(old);
  }

  const ExperimentConfig& cfg_;
  std::ostream* log_;
  fs::path target_;
  fs::path staging_;
  fs::path cache_;
  std::string stage_ = "setup";
  std::set<std::string> artifacts_;
  RunManifest m_;
};

// Draws N x p data matrices for one innovation law, with an on-disk cache.
class RowSampler {
 public:
  RowSampler(const ExperimentConfig& cfg, const std::string& law, bool need_filter,
             fs::path cache)
      : cfg_(cfg), law_(InnovationLaw::parse(law, cfg.ensemble.nu)), cache_(std::move(cache)) {
    source_ = cfg.ensemble.source;
    if (need_filter && source_ == RowSource::kToeplitz) {
      throw DomainError("this command needs a filter row source");
    }
    FilterOptions opts;
    opts.max_half_width = cfg.ensemble.max_half_width;
    switch (source_) {
      case RowSource::kGaussianDensity:
        if (!need_filter) law_ = InnovationLaw::gaussian();
        [[fallthrough]];
      case RowSource::kFilter:
        filter_ = std::make_unique<LinearFilter>(
            filter_from_density(cfg.density, cfg.ensemble.tail_tol, opts));
        break;
      case RowSource::kCausalFilter:
        filter_ = std::make_unique<LinearFilter>(
            causal_filter(cfg.density, cfg.ensemble.tail_tol));
        break;
      case RowSource::kToeplitz:
        break;
    }
    key_ = cfg.density.describe() + "|" + cfg.canonical["ensemble"]["source"].get<std::string>() +
           "|" + law_.describe() + "|" + format_double(cfg.ensemble.tail_tol) + "|" +
           std::to_string(cfg.ensemble.max_half_width) + "|v" +
           std::to_string(kDataMatrixVersion);
  }

  const LinearFilter* filter() const { return filter_.get(); }

  DataMatrix sample(std::size_t n, std::size_t p, std::uint64_t seed) {
    fs::path path;
    if (!cache_.empty()) {
      const std::uint64_t h = fnv1a64(key_ + "|" + std::to_string(n) + "x" + std::to_string(p) +
                                      "|" + std::to_string(seed));
      path = cache_ / ("dm-" + hex(h) + ".gldm");
      if (fs::exists(path)) {
        try {
          DataMatrix x = read_data_matrix(path);
          if (x.rows() == n && x.cols() == p && x.seed() == seed) return x;
        } catch (const Error&) {
          // Unreadable cache entries are regenerated below.
        }
      }
    }
    DataMatrix x = draw(n, p, seed);
    if (!path.empty()) write_data_matrix(path, x);
    return x;
  }

 private:
  DataMatrix draw(std::size_t n, std::size_t p, std::uint64_t seed) {
    if (source_ == RowSource::kToeplitz) {
      std::shared_ptr<const ToeplitzSampler> sampler;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        auto& slot = toeplitz_[p];
        if (!slot) slot = std::make_shared<const ToeplitzSampler>(cfg_.density, p);
        sampler = slot;
      }
      return sampler->sample(n, seed);
    }
    const EnsembleConfig ec{n, p, FilterSource{*filter_, law_}, seed};
    return generate(ec);
  }

  const ExperimentConfig& cfg_;
  InnovationLaw law_;
  fs::path cache_;
  RowSource source_;
  std::unique_ptr<LinearFilter> filter_;
  std::string key_;
  std::mutex mutex_;
  std::map<std::size_t, std::shared_ptr<const ToeplitzSampler>> toeplitz_;
};

json limit_json(const LimitDistribution& l, const ExperimentConfig& cfg,
                const SpectralDensity& f) {
  return limit_sidecar(l, f, cfg.solver, cfg.eps_ladder);
}

LimitDistribution solve_and_write(Workspace& ws, const ExperimentConfig& cfg,
                                  const SpectralDensity& f, const Rational& c,
                                  const std::string& stem) {
  const auto grid = cfg.density.describe() == f.describe() ? cfg.resolve_x_grid(c.value())
                                                          : auto_x_grid(f, c.value(), cfg.x_points);
  LimitDistribution l = invert_to_distribution(f, c.value(), grid, cfg.eps_ladder, cfg.solver);
  write_limit_csv(ws.file(stem + ".csv"), l);
  write_json(ws.file(stem + ".json"), limit_json(l, cfg, f));
  ws.say("limit c=" + c.str() + ": " + std::to_string(l.x.size()) + " points, mass " +
         format_double(l.cdf.back()) + ", max residual " + format_double(l.max_residual));
  return l;
}

void normalization_checks(Workspace& ws, const LimitDistribution& l, const std::string& suffix) {
  const double err = std::abs(l.cdf.back() - 1.0);
  ws.check("normalization" + suffix, err, 2e-3, err <= 2e-3);
  const double expected = std::max(0.0, 1.0 - 1.0 / l.c);
  ws.check("atom0" + suffix, std::abs(l.atom0 - expected), 0.0, l.atom0 == expected);
}

// Strictly (or weakly) decreasing check over a sequence; value is the
// largest step up.
void trend_check(Workspace& ws, const std::string& name, const std::vector<double>& v,
                 bool strict) {
  if (v.size() < 2) return;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) worst = std::max(worst, v[i + 1] - v[i]);
  ws.check(name, worst, 0.0, strict ? worst < 0.0 : worst <= 0.0);
}

template <typename Body>
RunManifest guarded(const ExperimentConfig& cfg, const RunOptions& opt, Command expected,
                    Body&& body) {
  if (cfg.command != expected) {
    throw DomainError("config command is " + std::string(to_string(cfg.command)) + ", not " +
                      std::string(to_string(expected)));
  }
  Workspace ws(cfg, opt);
  try {
    body(ws);
  } catch (const std::exception& e) {
    return ws.fail(e.what());
  }
  return ws.commit();
}

struct Item {
  std::size_t n = 0;
  std::size_t p = 0;
  std::uint64_t seed = 0;
  Esd esd;
  double levy = 0.0;
  double kolmogorov = 0.0;
};

std::vector<Item> make_items(const ExperimentConfig& cfg) {
  std::vector<Item> items;
  for (const auto& [n, p] : cfg.sizes) {
    for (std::uint64_t s : cfg.seeds) items.push_back({n, p, s, {}, 0.0, 0.0});
  }
  return items;
}

void sample_esds(const ExperimentConfig& cfg, RowSampler& sampler, std::vector<Item>& items,
                 std::uint64_t seed_offset = 0) {
  parallel_for(items.size(), cfg.workers, [&](std::size_t i) {
    Item& it = items[i];
    it.esd = gram_esd(sampler.sample(it.n, it.p, it.seed ^ seed_offset));
  });
}

}  // namespace

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["config_hash"] = hex(config_hash);
  j["version"] = version;
  json t = json::array();
  for (const auto& [name, secs] : timings) t.push_back({{"stage", name}, {"seconds", secs}});
  j["timings"] = t;
  json c = json::array();
  for (const Check& k : checks) {
    c.push_back({{"name", k.name}, {"value", k.value}, {"threshold", k.threshold}, {"pass", k.pass}});
  }
  j["checks"] = c;
  j["seeds"] = seeds;
  j["status"] = status;
  if (!failure_stage.empty()) j["failure_stage"] = failure_stage;
  if (!error.empty()) j["error"] = error;
  j["artifacts"] = artifacts;
  j["artifact_hash"] = hex(artifact_hash);
  j["summary"] = summary;
  j["output_dir"] = output_dir.string();
  return j;
}

fs::path default_output_root() {
  if (const char* env = std::getenv("GRAMLIMIT_OUTPUT_ROOT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "runs";
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

int exit_code(const RunManifest& m) {
  if (m.status == "pass") return 0;
  if (m.status == "fail") return 1;
  return 3;
}

RunManifest run_solve(const ExperimentConfig& cfg, const RunOptions& opt) {
  return guarded(cfg, opt, Command::kSolve, [&](Workspace& ws) {
    const LimitDistribution l =
        ws.stage("solve_limit", [&] { return solve_and_write(ws, cfg, cfg.density, cfg.c, "limit"); });
    ws.stage("stieltjes", [&] {
      const double c = cfg.c.value();
      std::vector<Complex> s(cfg.z_grid.size());
      double min_im = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < cfg.z_grid.size(); ++i) {
        const LimitSolution sol = solve_limit_density(cfg.density, c, cfg.z_grid[i], cfg.solver);
        s[i] = sol.s;
        min_im = std::min({min_im, sol.s.imag(), sol.s_under.imag()});
      }
      write_stieltjes_csv(ws.file("stieltjes.csv"), cfg.z_grid, s);
      if (!cfg.z_grid.empty()) ws.check("herglotz", min_im, 0.0, min_im > 0.0);
    });
    normalization_checks(ws, l, "");
    if (cfg.emit_plots) {
      ws.text("limit.svg", line_chart_svg(std::vector<Series>{{"density", l.x, l.density}},
                                          "limit density, c = " + cfg.c.str(), "x", "density"));
    }
    ws.summary() = {{"continuous_mass", l.continuous_mass()},
                    {"atom0", l.atom0},
                    {"edges", l.edges},
                    {"max_residual", l.max_residual}};
  });
}

RunManifest run_simulate(const ExperimentConfig& cfg, const RunOptions& opt) {
  return guarded(cfg, opt, Command::kSimulate, [&](Workspace& ws) {
    auto sampler = ws.stage("prepare", [&] {
      return std::make_unique<RowSampler>(cfg, cfg.ensemble.innovation, false, ws.cache());
    });
    std::vector<Item> items = make_items(cfg);
    ws.stage("simulate", [&] {
      std::vector<fs::path> esd_csv(items.size()), esd_txt(items.size()), data(items.size());
      for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string t = size_tag(items[i].n, items[i].p, items[i].seed);
        esd_csv[i] = ws.file("esd_" + t + ".csv");
        esd_txt[i] = ws.file("esd_" + t + ".txt");
        if (cfg.export_csv) data[i] = ws.file("data_" + t + ".csv");
      }
      parallel_for(items.size(), cfg.workers, [&](std::size_t i) {
        Item& it = items[i];
        const DataMatrix x = sampler->sample(it.n, it.p, it.seed);
        if (cfg.export_csv) write_data_matrix_csv(data[i], x);
        it.esd = gram_esd(x);
        write_esd_csv(esd_csv[i], it.esd);
        write_esd_text(esd_txt[i], it.esd);
      });
    });
    std::string csv = "N,p,seed,min_eig,max_eig\n";
    json rows = json::array();
    for (const Item& it : items) {
      csv += std::to_string(it.n) + "," + std::to_string(it.p) + "," + std::to_string(it.seed) +
             "," + format_double(it.esd.min()) + "," + format_double(it.esd.max()) + "\n";
      rows.push_back({{"N", it.n}, {"p", it.p}, {"seed", it.seed},
                      {"min_eig", it.esd.min()}, {"max_eig", it.esd.max()}});
      ws.say(size_tag(it.n, it.p, it.seed) + ": eigenvalues in [" + format_double(it.esd.min()) +
             ", " + format_double(it.esd.max()) + "]");
    }
    ws.text("simulate.csv", csv);
    ws.summary() = {{"items", rows}};
  });
}

RunManifest run_compare(const ExperimentConfig& cfg, const RunOptions& opt) {
  return guarded(cfg, opt, Command::kCompare, [&](Workspace& ws) {
    auto sampler = ws.stage("prepare", [&] {
      return std::make_unique<RowSampler>(cfg, cfg.ensemble.innovation, false, ws.cache());
    });
    std::vector<Item> items = make_items(cfg);

    std::map<std::pair<std::int64_t, std::int64_t>, LimitDistribution> limits;
    std::map<std::pair<std::int64_t, std::int64_t>, StepCdf> cdfs;
    ws.stage("solve_limit", [&] {
      for (const auto& [n, p] : cfg.sizes) {
        const Rational c = ratio(n, p);
        const auto key = std::make_pair(c.num, c.den);
        if (limits.count(key) != 0) continue;
        LimitDistribution l = solve_and_write(ws, cfg, cfg.density, c, "limit_c" + tag(c));
        normalization_checks(ws, l, "_c" + tag(c));
        cdfs.emplace(key, l.to_cdf());
        limits.emplace(key, std::move(l));
      }
    });

    ws.stage("simulate", [&] { sample_esds(cfg, *sampler, items); });

    ws.stage("distances", [&] {
      parallel_for(items.size(), cfg.workers, [&](std::size_t i) {
        Item& it = items[i];
        const Rational c = ratio(it.n, it.p);
        const StepCdf& lim = cdfs.at({c.num, c.den});
        const StepCdf emp = StepCdf::from_esd(it.esd);
        it.levy = levy_distance(emp, lim);
        it.kolmogorov = kolmogorov_distance(emp, lim);
      });
      const double nan = std::numeric_limits<double>::quiet_NaN();
      for (const Item& it : items) {
        const std::string t = size_tag(it.n, it.p, it.seed);
        write_esd_csv(ws.file("esd_" + t + ".csv"), it.esd);
        const std::vector<DistanceRow> rows = {{"levy", it.levy, nan, true},
                                               {"kolmogorov", it.kolmogorov, nan, true}};
        write_distance_csv(ws.file("distance_" + t + ".csv"), rows);
        ws.say(t + ": levy " + format_double(it.levy) + ", kolmogorov " +
               format_double(it.kolmogorov));
      }
    });

    std::string summary = "N,p,seed,levy,kolmogorov\n";
    for (const Item& it : items) {
      summary += std::to_string(it.n) + "," + std::to_string(it.p) + "," +
                 std::to_string(it.seed) + "," + format_double(it.levy) + "," +
                 format_double(it.kolmogorov) + "\n";
    }
    ws.text("summary.csv", summary);

    const bool levy = cfg.thresholds.metric == "levy";
    std::vector<double> medians;
    std::vector<double> ns;
    std::string med_csv = "N,p,levy,kolmogorov\n";
    json med_json = json::array();
    for (const auto& [n, p] : cfg.sizes) {
      std::vector<double> lv, kv;
      for (const Item& it : items) {
        if (it.n == n && it.p == p) {
          lv.push_back(it.levy);
          kv.push_back(it.kolmogorov);
        }
      }
      const double ml = median(lv), mk = median(kv);
      medians.push_back(levy ? ml : mk);
      ns.push_back(static_cast<double>(n));
      med_csv += std::to_string(n) + "," + std::to_string(p) + "," + format_double(ml) + "," +
                 format_double(mk) + "\n";
      med_json.push_back({{"N", n}, {"p", p}, {"levy", ml}, {"kolmogorov", mk}});
    }
    ws.text("medians.csv", med_csv);
    ws.check("median_" + cfg.thresholds.metric + "_largest_N", medians.back(),
             cfg.thresholds.compare, medians.back() <= cfg.thresholds.compare);
    if (cfg.thresholds.require_decreasing) {
      trend_check(ws, "median_" + cfg.thresholds.metric + "_decreasing", medians, true);
    }
    ws.summary() = {{"metric", cfg.thresholds.metric}, {"medians", med_json}};

    if (cfg.emit_plots) {
      const auto& [n, p] = cfg.sizes.back();
      const Rational c = ratio(n, p);
      for (const Item& it : items) {
        if (it.n == n && it.p == p) {
          ws.text("overlay.svg",
                  overlay_svg(limits.at({c.num, c.den}), it.esd.eigs(),
                              "ESD vs limit, " + size_tag(it.n, it.p, it.seed)));
          break;
        }
      }
      ws.text("medians.svg", line_chart_svg(std::vector<Series>{{cfg.thresholds.metric, ns, medians}},
                                            "median distance to the limit", "N",
                                            cfg.thresholds.metric));
    }
  });
}

RunManifest run_universality(const ExperimentConfig& cfg, const RunOptions& opt) {
  return guarded(cfg, opt, Command::kUniversality, [&](Workspace& ws) {
    auto samplers = ws.stage("prepare", [&] {
      return std::make_pair(
          std::make_unique<RowSampler>(cfg, cfg.ensemble.innovation, true, ws.cache()),
          std::make_unique<RowSampler>(cfg, cfg.ensemble.reference_innovation, true, ws.cache()));
    });
    std::vector<Item> xs = make_items(cfg);
    std::vector<Item> ys = make_items(cfg);
    ws.stage("simulate", [&] {
      sample_esds(cfg, *samplers.first, xs);
      sample_esds(cfg, *samplers.second, ys, kReferenceStream);
    });

    std::vector<double> medians;
    std::vector<double> ns;
    json per_n = json::array();
    ws.stage("distances", [&] {
      parallel_for(xs.size(), cfg.workers, [&](std::size_t i) {
        xs[i].levy = levy_distance(StepCdf::from_esd(xs[i].esd), StepCdf::from_esd(ys[i].esd));
        xs[i].kolmogorov =
            kolmogorov_distance(StepCdf::from_esd(xs[i].esd), StepCdf::from_esd(ys[i].esd));
      });
      std::string csv = "N,p,seed,levy,kolmogorov\n";
      std::string gap_csv = "N,p,re_z,im_z,gap\n";
      for (const auto& [n, p] : cfg.sizes) {
        std::vector<double> lv;
        std::vector<const Item*> xi, yi;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (xs[i].n != n || xs[i].p != p) continue;
          lv.push_back(xs[i].levy);
          xi.push_back(&xs[i]);
          yi.push_back(&ys[i]);
          csv += std::to_string(n) + "," + std::to_string(p) + "," + std::to_string(xs[i].seed) +
                 "," + format_double(xs[i].levy) + "," + format_double(xs[i].kolmogorov) + "\n";
        }
        double worst_gap = 0.0;
        for (const Complex z : cfg.z_grid) {
          Complex mean_y{0.0, 0.0};
          for (const Item* y : yi) mean_y += stieltjes_empirical(y->esd, z);
          mean_y /= static_cast<double>(yi.size());
          double gap = 0.0;
          for (const Item* x : xi) gap += std::abs(stieltjes_empirical(x->esd, z) - mean_y);
          gap /= static_cast<double>(xi.size());
          worst_gap = std::max(worst_gap, gap);
          gap_csv += std::to_string(n) + "," + std::to_string(p) + "," + format_double(z.real()) +
                     "," + format_double(z.imag()) + "," + format_double(gap) + "\n";
        }
        const double m = median(lv);
        medians.push_back(m);
        ns.push_back(static_cast<double>(n));
        per_n.push_back({{"N", n}, {"p", p}, {"median_levy", m}, {"max_stieltjes_gap", worst_gap}});
        ws.say("N=" + std::to_string(n) + ": median levy " + format_double(m) +
               ", max stieltjes gap " + format_double(worst_gap));
      }
      ws.text("universality.csv", csv);
      ws.text("stieltjes_gap.csv", gap_csv);
    });

    ws.check("median_levy_largest_N", medians.back(), cfg.thresholds.universality,
             medians.back() <= cfg.thresholds.universality);
    if (cfg.thresholds.require_decreasing && medians.size() >= 2) {
      ws.check("median_levy_below_smallest_N", medians.back() - medians.front(), 0.0,
               medians.back() < medians.front());
    }
    ws.summary() = {{"innovation", cfg.ensemble.innovation},
                    {"reference", cfg.ensemble.reference_innovation},
                    {"per_n", per_n}};
    if (cfg.emit_plots) {
      ws.text("universality.svg", line_chart_svg(std::vector<Series>{{"median levy", ns, medians}},
                                                 "levy distance between innovation laws", "N",
                                                 "levy"));
    }
  });
}

RunManifest run_toeplitz(const ExperimentConfig& cfg, const RunOptions& opt) {
  return guarded(cfg, opt, Command::kToeplitz, [&](Workspace& ws) {
    struct Row {
      std::size_t p;
      Esd esd;
      double kolmogorov;
    };
    std::vector<Row> rows;
    for (std::size_t p : cfg.toeplitz_p) rows.push_back({p, {}, 0.0});
    ws.stage("eigenvalues", [&] {
      parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
        const Matrix g = toeplitz_matrix(cfg.density, rows[i].p);
        rows[i].esd = symmetric_eigenvalues(SymMatrix::from_lower(g));
      });
    });
    ws.stage("distances", [&] {
      std::string csv = "p,kolmogorov,min_eig,max_eig\n";
      for (Row& r : rows) {
        // H is evaluated at the distinct eigenvalues; both laws are then
        // compared exactly at every jump of the ESD.
        std::vector<double> grid(r.esd.eigs().begin(), r.esd.eigs().end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        grid.erase(std::remove_if(grid.begin(), grid.end(), [](double v) { return !(v > 0.0); }),
                   grid.end());
        const Pushforward h = h_pushforward(cfg.density, grid);
        r.kolmogorov = kolmogorov_distance(StepCdf::from_esd(r.esd), StepCdf::from_grid(h.x, h.cdf));
        write_esd_csv(ws.file("esd_toeplitz_p" + std::to_string(r.p) + ".csv"), r.esd);
        csv += std::to_string(r.p) + "," + format_double(r.kolmogorov) + "," +
               format_double(r.esd.min()) + "," + format_double(r.esd.max()) + "\n";
        ws.say("p=" + std::to_string(r.p) + ": kolmogorov " + format_double(r.kolmogorov));
      }
      ws.text("toeplitz.csv", csv);
    });
    const double last = rows.back().kolmogorov;
    ws.check("kolmogorov_largest_p", last, cfg.thresholds.toeplitz,
             last <= cfg.thresholds.toeplitz);
    if (cfg.thresholds.require_decreasing && rows.size() >= 2) {
      ws.check("kolmogorov_below_smallest_p", last - rows.front().kolmogorov, 0.0,
               last < rows.front().kolmogorov);
    }
    json per_p = json::array();
    std::vector<double> ps, ks;
    for (const Row& r : rows) {
      per_p.push_back({{"p", r.p}, {"kolmogorov", r.kolmogorov}});
      ps.push_back(static_cast<double>(r.p));
      ks.push_back(r.kolmogorov);
    }
    ws.summary() = {{"per_p", per_p}};
    if (cfg.emit_plots) {
      ws.text("toeplitz.svg", line_chart_svg(std::vector<Series>{{"kolmogorov", ps, ks}},
                                             "Toeplitz spectrum vs H", "p", "kolmogorov"));
    }
  });
}

RunManifest run_truncation(const ExperimentConfig& cfg, const RunOptions& opt) {
  return guarded(cfg, opt, Command::kTruncation, [&](Workspace& ws) {
    const double c = cfg.c.value();
    const TruncationLadder ladder = ws.stage("ladder", [&] {
      std::vector<double> grid = cfg.x_grid;
      if (grid.empty()) {
        grid = auto_x_grid(truncate_density(cfg.density, cfg.truncation_b.back()), c,
                           cfg.x_points);
      }
      return truncation_ladder(cfg.density, c, cfg.truncation_b, grid, cfg.solver,
                               cfg.eps_ladder);
    });
    std::string csv = "b,mass,gap_to_next\n";
    json rungs = json::array();
    std::vector<Series> curves;
    for (std::size_t i = 0; i < ladder.b.size(); ++i) {
      const LimitDistribution& l = ladder.limits[i];
      const SpectralDensity fb = truncate_density(cfg.density, ladder.b[i]);
      write_limit_csv(ws.file("limit_b" + tag(ladder.b[i]) + ".csv"), l);
      write_json(ws.file("limit_b" + tag(ladder.b[i]) + ".json"), limit_json(l, cfg, fb));
      const double gap = i < ladder.gaps.size() ? ladder.gaps[i]
                                                : std::numeric_limits<double>::quiet_NaN();
      csv += format_double(ladder.b[i]) + "," + format_double(ladder.masses[i]) + "," +
             (std::isnan(gap) ? std::string() : format_double(gap)) + "\n";
      rungs.push_back({{"b", ladder.b[i]}, {"mass", ladder.masses[i]},
                       {"gap_to_next", std::isnan(gap) ? json() : json(gap)}});
      ws.say("b=" + format_double(ladder.b[i]) + ": mass " + format_double(ladder.masses[i]) +
             (std::isnan(gap) ? "" : ", gap to next " + format_double(gap)));
      curves.push_back({"b = " + format_double(ladder.b[i]), l.x, l.cdf});
    }
    ws.text("ladder.csv", csv);
    if (!ladder.gaps.empty()) {
      ws.check("final_gap", ladder.gaps.back(), cfg.thresholds.ladder,
               ladder.gaps.back() <= cfg.thresholds.ladder);
      trend_check(ws, "gaps_weakly_decreasing", ladder.gaps, false);
    }
    std::vector<double> neg_mass(ladder.masses.size());
    std::transform(ladder.masses.begin(), ladder.masses.end(), neg_mass.begin(),
                   [](double m) { return -m; });
    trend_check(ws, "masses_nondecreasing", neg_mass, false);
    ws.summary() = {{"rungs", rungs}};
    if (cfg.emit_plots) {
      ws.text("ladder.svg", line_chart_svg(curves, "limit CDF per truncation level", "x", "F"));
    }
  });
}

RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  switch (cfg.command) {
    case Command::kSolve: return run_solve(cfg, opt);
    case Command::kSimulate: return run_simulate(cfg, opt);
    case Command::kCompare: return run_compare(cfg, opt);
    case Command::kUniversality: return run_universality(cfg, opt);
    case Command::kToeplitz: return run_toeplitz(cfg, opt);
    case Command::kTruncation: return run_truncation(cfg, opt);
  }
  throw DomainError("unknown command");
}

}  // namespace gramlimit
