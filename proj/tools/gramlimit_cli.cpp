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

// gramlimit: limiting spectra of Gram matrices with stationary rows.
//
//   gramlimit solve --config run.json
//   gramlimit compare --set density.family=ar1 --set density.phi=0.5
//
// Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration,
// 3 a stage raised an error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gramlimit/config.hpp"
#include "gramlimit/experiment.hpp"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> sets;
  std::string output_root;
  unsigned workers = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("-c,--config", a.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("-s,--set", a.sets, "override, as dotted.key=value (repeatable)");
  sub->add_option("-o,--output-root", a.output_root,
                  "directory for runs and the data cache (default $GRAMLIMIT_OUTPUT_ROOT or runs)");
  sub->add_option("-j,--workers", a.workers, "worker threads")->check(CLI::Range(1u, 256u));
  sub->add_flag("-q,--quiet", a.quiet, "print only the final status line");
}

int run(const std::string& command, const Args& a) {
  using gramlimit::ConfigError;
  nlohmann::json tree = nlohmann::json::object();
  gramlimit::ExperimentConfig cfg;
  try {
    if (!a.config.empty()) {
      std::ifstream in(a.config);
      std::stringstream ss;
      ss << in.rdbuf();
      const std::string text = ss.str();
      try {
        tree = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error&) {
        // Reparse for an error message with line and column.
        (void)gramlimit::parse_config(std::string_view(text));
        throw;
      }
    }
    if (tree.contains("command") && tree["command"] != command) {
      throw ConfigError({"config command " + tree["command"].dump() +
                         " does not match subcommand " + command});
    }
    tree["command"] = command;
    for (const std::string& s : a.sets) gramlimit::apply_override(tree, s);
    if (a.workers != 0) tree["workers"] = a.workers;
    cfg = gramlimit::parse_config(tree);
  } catch (const ConfigError& e) {
    for (const std::string& msg : e.errors()) std::cerr << "config: " << msg << "\n";
    return 2;
  } catch (const gramlimit::Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }

  gramlimit::RunOptions opt;
  opt.output_root = a.output_root.empty() ? gramlimit::default_output_root()
                                          : std::filesystem::path(a.output_root);
  opt.log = a.quiet ? nullptr : &std::cerr;
  try {
    const gramlimit::RunManifest m = gramlimit::run_experiment(cfg, opt);
    for (const gramlimit::Check& c : m.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value
                << " (threshold " << c.threshold << ")\n";
    }
    std::cout << m.status << " " << m.output_dir.string() << "\n";
    if (!m.error.empty()) std::cerr << "error in " << m.failure_stage << ": " << m.error << "\n";
    return gramlimit::exit_code(m);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting spectral distributions of Gram matrices with stationary rows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GRAMLIMIT_VERSION);
  Args args;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve the limit equation and invert to a density"},
      {"simulate", "generate data matrices and their Gram spectra"},
      {"compare", "distance between simulated spectra and the limit"},
      {"toeplitz", "Toeplitz covariance spectra against the law H"},
      {"universality", "spectra under two innovation laws"},
      {"truncation", "limits of truncated densities"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), args);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return run(app.get_subcommands().front()->get_name(), args);
}
