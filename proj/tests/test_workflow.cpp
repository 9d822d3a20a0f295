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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

#include "tbp/beam_io.hpp"
#include "tbp/experiment.hpp"
#include "testing.hpp"

using namespace tbp;
namespace fs = std::filesystem;

namespace {

// 32 elements, depths 2..30 mm: small enough for the full sweep.
ExperimentConfig small_config(const fs::path& dir) {
  auto c = config_from_json(parse_toml(R"(
[probe]
num_elements = 32
[grid]
depth_min_mm = 2
depth_max_mm = 30
depth_step_mm = 0.5
[target]
z_center_cm = 1.25
z_length_cm = 1.5
[sweep]
focal_depths_cm = [1, 1.5, 2, 2.5]
[search]
frequencies_mhz = [4.5]
apertures = [8]
[swarm]
particles = 10
iterations = 15
seed = 5
)"));
  c.output_dir = dir / "out";
  c.cache_dir = dir / "cache";
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(TBP_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("beam csv round trip and parse errors") {
  const auto dir = testing::scratch_dir("beam_io");
  const auto& m = testing::small_map();
  const auto bp = synthesize(m, DelayProfile{4, {0.0, 1e-8}, m.frequency()});
  write_beam_csv(dir / "b.csv", bp, "note");
  const auto back = read_beam_csv(dir / "b.csv");
  REQUIRE(back.power.size() == bp.power.size());
  for (std::size_t k = 0; k < bp.power.size(); ++k)
    REQUIRE(back.power[k] == doctest::Approx(bp.power[k]).epsilon(1e-8));
  CHECK(format_fixed9(1.0) == "1.00000000e+00");

  std::ofstream(dir / "bad.csv") << "z_mm\\x_mm,-1,0,1\n2,1,2,3\n3,1,oops,3\n";
  try {
    read_beam_csv(dir / "bad.csv");
    FAIL("expected BeamFileError");
  } catch (const BeamFileError& e) {
    CHECK(std::string(e.what()).find("bad.csv:3:") != std::string::npos);
  }
  write_beam_pgm(dir / "b.pgm", bp);
  CHECK(slurp(dir / "b.pgm").rfind("P5", 0) == 0);
}

TEST_CASE("simulate, evaluate and compare") {
  const auto dir = testing::scratch_dir("workflow");
  const auto config = small_config(dir);
  const ResponseCache cache(config.cache_dir);

  const auto sweep = cmd_simulate(config, {}, cache);
  CHECK(sweep.size() == 16);
  CHECK(cache.misses() == 1);
  for (const auto& p : sweep) {
    CHECK(fs::exists(p));
    CHECK(fs::exists(fs::path(p).replace_extension(".pgm")));
    CHECK(fs::exists(fs::path(p).replace_extension(".json")));
  }
  const std::string first = slurp(sweep.front());
  CHECK(first.find(provenance_line(config)) != std::string::npos);

  SUBCASE("warm cache gives identical files") {
    const ResponseCache warm(config.cache_dir, true);
    const auto again = cmd_simulate(config, {}, warm);
    CHECK(warm.hits() == 1);
    CHECK(slurp(again.front()) == first);
  }

  SUBCASE("explicit two-element profile") {
    SimulateRequest req;
    req.half_delays = std::vector<double>{0.0};
    const auto files = cmd_simulate(config, req, cache);
    REQUIRE(files.size() == 1);
    const auto bp = read_beam_csv(files[0]);
    const std::size_t last = bp.grid.lateral_count() - 1;
    for (std::size_t v = 0; v < bp.grid.depth_count(); ++v)
      for (std::size_t u = 0; u <= last; ++u) REQUIRE(bp.at(u, v) == bp.at(last - u, v));
  }

  SUBCASE("pinned axes") {
    SimulateRequest req;
    req.aperture = 20;
    CHECK(cmd_simulate(config, req, cache).size() == 4);
    req.focal_depth = 15e-3;
    CHECK(cmd_simulate(config, req, cache).size() == 1);
  }

  SUBCASE("report table") {
    const auto rows = cmd_evaluate(sweep, config);
    CHECK(rows.size() == 16);
    CHECK(rows[0].labels["kind"] == "standard");
    const auto csv = slurp(config.output_dir / "report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 18);
    CHECK(fs::exists(config.output_dir / "report.json"));

    const auto cmp = cmd_compare({sweep[0], sweep[5]}, config);
    CHECK(cmp.size() == 2);
    const auto diff = slurp(config.output_dir / "compare.csv");
    CHECK(diff.find("std_z1cm_a16,std_z1cm_a16,interest,mlw_mean_mm") != std::string::npos);
  }

  SUBCASE("empty and degenerate inputs") {
    CHECK(cmd_evaluate({}, config).empty());
    const auto csv = slurp(config.output_dir / "report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

    auto flat = read_beam_csv(sweep.front());
    for (double& p : flat.power) p = 1.0;
    write_beam_csv(dir / "flat.csv", flat);
    const auto rows = cmd_evaluate({dir / "flat.csv"}, config);
    CHECK(rows[0].report.interest.sll_undefined > 0);
    CHECK(slurp(config.output_dir / "report.csv").find("undefined") != std::string::npos);
  }
}

TEST_CASE("optimize is deterministic") {
  const auto dir = testing::scratch_dir("optimize");
  auto config = small_config(dir);
  const ResponseCache cache(config.cache_dir);
  const auto a = cmd_optimize(config, cache);
  const auto first = slurp(config.output_dir / "optimize" / "result.json");
  const auto b = cmd_optimize(config, cache);
  CHECK(a.best_half_delays == b.best_half_delays);
  CHECK(slurp(config.output_dir / "optimize" / "result.json") == first);
  CHECK(fs::exists(config.output_dir / "optimize" / "opt_f4.5mhz_a8.csv"));
  CHECK(fs::exists(config.output_dir / "optimize" / "delay_profiles.csv"));
  CHECK(optimization_json(a, config).dump(2) + "\n" == first);

  config.candidates.apertures.clear();
  CHECK_THROWS(cmd_optimize(config, cache));
}

TEST_CASE("validation harness") {
  const auto dir = testing::scratch_dir("validate");
  const auto config = small_config(dir);
  const ResponseCache cache(config.cache_dir);
  const auto ok = cmd_validate(config, 20, 1e-6, cache);
  CHECK(ok.passed);
  CHECK(ok.oracle_max_rel <= 1e-6);
  CHECK(fs::exists(config.output_dir / "validate.json"));
  CHECK_FALSE(cmd_validate(config, 20, 0.0, cache).passed);
  CHECK_THROWS(cmd_validate(config, 0, 1e-6, cache));
}

TEST_CASE("command line exit codes") {
  const auto dir = testing::scratch_dir("cli");
  std::ofstream(dir / "small.toml") << "[probe]\nnum_elements = 16\n[grid]\ndepth_max_mm = 31\n"
                                       "[sweep]\napertures = [8]\n[search]\napertures = [8]\n";
  const std::string common = "--config " + (dir / "small.toml").string() + " --out " +
                             (dir / "out").string() + " --cache " + (dir / "cache").string();
  CHECK(run_cli("validate " + common + " --trials 10") == 0);
  CHECK(run_cli("validate " + common + " --trials 10 --tolerance 0") == 1);
  CHECK(run_cli("simulate " + common + " --focal-depth 2 --aperture 8") == 0);
  CHECK(run_cli("simulate " + common + " --aperture 7") == 2);
  CHECK(run_cli("simulate --config " + (dir / "missing.toml").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate --no-cache --cache-only") == 2);
  CHECK(run_cli("evaluate " + common + " " + (dir / "nope.csv").string()) == 2);
  CHECK(run_cli("simulate " + common + " --cache-only --frequency 5") == 2);
}
