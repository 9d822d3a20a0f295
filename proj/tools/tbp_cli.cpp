/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 tbp contributors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// tbp: simulate, optimise and evaluate transmit beam patterns of a linear probe.
//
// Exit status: 0 success, 1 validation failure, 2 configuration or runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbp/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kError = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string cache;
  bool no_cache = false;
  bool cache_only = false;
  std::optional<double> focal_depth_cm;
  std::optional<int> aperture;
  std::optional<double> frequency_mhz;
  std::vector<double> delays_us;
  std::vector<std::string> beams;
  int trials = 100;
  double tolerance = 1e-6;
};

tbp::ExperimentConfig make_config(const Options& opt) {
  tbp::ExperimentConfig config = opt.config.empty() ? tbp::ExperimentConfig{} : tbp::load_config(opt.config);
  if (opt.seed) config.swarm.seed = *opt.seed;
  if (!opt.out.empty()) config.output_dir = opt.out;
  if (!opt.cache.empty()) config.cache_dir = opt.cache;
  config.validate();
  return config;
}

tbp::ResponseCache make_cache(const Options& opt, const tbp::ExperimentConfig& config) {
  if (opt.no_cache) {
    if (opt.cache_only) throw tbp::ConfigError("--cache-only and --no-cache are exclusive");
    return tbp::ResponseCache(std::nullopt);
  }
  return tbp::ResponseCache(config.cache_dir, opt.cache_only);
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "Experiment file (TOML)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "Swarm seed");
  cmd->add_option("--out", opt.out, "Output directory");
}

void add_cache(CLI::App* cmd, Options& opt) {
  cmd->add_option("--cache", opt.cache, "Response-map cache directory");
  cmd->add_flag("--no-cache", opt.no_cache, "Do not read or write cached response maps");
  cmd->add_flag("--cache-only", opt.cache_only, "Fail instead of computing a missing response map");
}

void print_rows(const std::vector<tbp::ReportRow>& rows) {
  for (const auto& r : rows) {
    std::printf("%-28s MLW %.3f +- %.3f mm  SLL %.2f dB  CLP %.3f\n", r.name.c_str(),
                r.report.interest.mlw_mean * 1e3, r.report.interest.mlw_std * 1e3,
                r.report.interest.sll_mean, r.report.interest.clp);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmit beam-pattern simulation and delay-profile optimisation"};
  app.set_version_flag("--version", std::string(tbp::kToolVersion));
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "Standard focal-law beams or one explicit delay profile");
  add_common(simulate, opt);
  add_cache(simulate, opt);
  simulate->add_option("--focal-depth", opt.focal_depth_cm, "Focal depth in cm (pins the sweep)");
  simulate->add_option("--aperture", opt.aperture, "Active elements (pins the sweep)");
  simulate->add_option("--frequency", opt.frequency_mhz, "Centre frequency in MHz");
  simulate->add_option("--delays", opt.delays_us, "Explicit half delays in us, inner element first")
      ->delimiter(',');

  auto* optimize = app.add_subcommand("optimize", "Greedy frequency/aperture scan with swarm-optimised delays");
  add_common(optimize, opt);
  add_cache(optimize, opt);

  auto* evaluate = app.add_subcommand("evaluate", "Metric report for beam CSV files");
  add_common(evaluate, opt);
  evaluate->add_option("beams", opt.beams, "Beam CSV files");

  auto* compare = app.add_subcommand("compare", "Report plus differences from the first beam");
  add_common(compare, opt);
  compare->add_option("beams", opt.beams, "Beam CSV files");

  auto* validate = app.add_subcommand("validate", "Oracle and invariant checks");
  add_common(validate, opt);
  add_cache(validate, opt);
  validate->add_option("--trials", opt.trials, "Random points and delay instances")->check(CLI::PositiveNumber);
  validate->add_option("--tolerance", opt.tolerance, "Largest accepted relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    const auto config = make_config(opt);
    if (simulate->parsed()) {
      const auto cache = make_cache(opt, config);
      tbp::SimulateRequest req;
      if (opt.focal_depth_cm) req.focal_depth = *opt.focal_depth_cm * 1e-2;
      req.aperture = opt.aperture;
      if (opt.frequency_mhz) req.frequency = *opt.frequency_mhz * 1e6;
      if (!opt.delays_us.empty()) {
        if (opt.focal_depth_cm) throw tbp::ConfigError("--delays and --focal-depth are exclusive");
        std::vector<double> half;
        for (double d : opt.delays_us) half.push_back(d * 1e-6);
        req.half_delays = half;
      }
      for (const auto& p : tbp::cmd_simulate(config, req, cache)) std::cout << p.string() << '\n';
    } else if (optimize->parsed()) {
      const auto cache = make_cache(opt, config);
      const auto r = tbp::cmd_optimize(config, cache);
      std::printf("best: %.3f MHz, %d elements, objective %.6g\n", r.best_frequency / 1e6,
                  r.best_aperture, r.best_objective);
      std::cout << (config.output_dir / "optimize" / "result.json").string() << '\n';
    } else if (evaluate->parsed() || compare->parsed()) {
      const std::vector<std::filesystem::path> beams(opt.beams.begin(), opt.beams.end());
      print_rows(evaluate->parsed() ? tbp::cmd_evaluate(beams, config) : tbp::cmd_compare(beams, config));
    } else if (validate->parsed()) {
      const auto cache = make_cache(opt, config);
      const auto s = tbp::cmd_validate(config, opt.trials, opt.tolerance, cache);
      std::cout << s.to_json().dump(2) << '\n';
      return s.passed ? kOk : kValidationFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "tbp: " << e.what() << '\n';
    return kError;
  }
  return kOk;
}
