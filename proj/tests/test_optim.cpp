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

#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "tbp/optim.hpp"
#include "testing.hpp"

using namespace tbp;

TEST_CASE("wrapping onto the torus") {
  const double t = 1.0 / 4.5e6;
  const auto w = wrap_to_torus(std::vector<double>{0.3 * t, 1.3 * t, -0.7 * t}, t);
  for (double x : w) CHECK(x == doctest::Approx(0.3 * t).epsilon(1e-12));
  const std::vector<double> canonical{0.0, 0.25 * t, 0.999 * t};
  CHECK(wrap_to_torus(canonical, t) == canonical);
  for (double x : wrap_to_torus(std::vector<double>{-1e-30, -t, 5 * t}, t)) {
    CHECK(x >= 0.0);
    CHECK(x < t);
  }
  CHECK(shortest_arc(0.1, 0.9, 1.0) == doctest::Approx(-0.2));
  CHECK(shortest_arc(0.9, 0.1, 1.0) == doctest::Approx(0.2));
}

TEST_CASE("swarm finds the centre of a geodesic bowl") {
  const double period = 2.0;
  const std::vector<double> opt{0.1, 1.9};
  const Objective bowl = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double a = shortest_arc(opt[d], x[d], period);
      s += a * a;
    }
    return s;
  };
  SwarmConfig cfg;
  cfg.particles = 30;
  cfg.iterations = 200;
  cfg.seed = 42;
  const auto r = pso_minimize(bowl, 2, period, cfg);
  for (std::size_t d = 0; d < 2; ++d)
    CHECK(std::abs(shortest_arc(opt[d], r.best[d], period)) <= 1e-3 * period);

  SUBCASE("seeded runs are identical") {
    const auto again = pso_minimize(bowl, 2, period, cfg);
    CHECK(again.best == r.best);
    CHECK(again.value == r.value);
    CHECK(again.trace == r.trace);
  }
  SUBCASE("trace is a running minimum") {
    REQUIRE(r.trace.size() == 200);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
    CHECK(r.trace.back() == r.value);
  }
}

TEST_CASE("swarm against an exhaustive grid") {
  const double period = 1.0;
  const double two_pi = 2 * std::numbers::pi;
  const Objective bumpy = [&](std::span<const double> x) {
    return -std::cos(two_pi * x[0]) - 0.6 * std::cos(two_pi * (2 * x[1] + 0.3)) -
           0.4 * std::cos(two_pi * (3 * (x[0] - x[1]) + 0.1)) + 3.0;
  };
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 360; ++i)
    for (int j = 0; j < 360; ++j) {
      const std::vector<double> x{i / 360.0, j / 360.0};
      grid_best = std::min(grid_best, bumpy(x));
    }
  SwarmConfig cfg;
  cfg.particles = 30;
  cfg.iterations = 200;
  cfg.seed = 9;
  const auto r = pso_minimize(bumpy, 2, period, cfg);
  CHECK(r.value <= grid_best + 0.01 * std::abs(grid_best));
}

TEST_CASE("non-finite evaluations are skipped") {
  int calls = 0;
  const Objective spiky = [&](std::span<const double> x) {
    return ++calls % 3 == 0 ? std::numeric_limits<double>::quiet_NaN() : x[0] * x[0];
  };
  SwarmConfig cfg;
  cfg.particles = 10;
  cfg.iterations = 20;
  const auto r = pso_minimize(spiky, 1, 1.0, cfg);
  CHECK(std::isfinite(r.value));
  const Objective broken = [](std::span<const double>) { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS(pso_minimize(broken, 1, 1.0, cfg));
}

TEST_CASE("swarm configuration checks") {
  SwarmConfig cfg;
  cfg.particles = 1;
  CHECK_THROWS(cfg.validate());
  cfg = SwarmConfig{};
  cfg.velocity_clamp = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = SwarmConfig{};
  CHECK_THROWS(pso_minimize([](std::span<const double>) { return 0.0; }, 0, 1.0, cfg));
}

TEST_CASE("greedy search") {
  const auto& m = testing::small_map();
  const PrescribedShape shape{10e-3, 10e-3, 0.5e-3};
  const MapBuilder builder = [&](double) { return m; };
  SwarmConfig cfg;
  cfg.particles = 20;
  cfg.iterations = 60;
  cfg.seed = 1234;

  const auto single = greedy_search(builder, CandidateSpace{{m.frequency()}, {8}}, shape, cfg);
  const auto target = rect_target(m.grid(), shape);
  const BeamObjective objective(m, 8, target,
                                objective_first_depth(m.grid(), shape, ObjectiveMask::FromTargetStart));
  const auto direct = pso_minimize([&](std::span<const double> r) { return objective(r); }, 4,
                                   objective.period(), cfg);
  CHECK(single.best_objective == direct.value);
  CHECK(single.best_half_delays == wrap_to_torus(direct.best, objective.period()));
  CHECK(single.objective_trace == direct.trace);
  CHECK(single.best_aperture == 8);
  REQUIRE(single.per_candidate.size() == 1);
  CHECK(single.per_candidate[0].seed == cfg.seed);

  const auto wider = greedy_search(builder, CandidateSpace{{m.frequency()}, {8, 2}}, shape, cfg);
  REQUIRE(wider.per_candidate.size() == 2);
  CHECK(wider.per_candidate[1].objective > single.best_objective);
  CHECK(wider.best_objective == single.best_objective);
  CHECK(wider.best_aperture == 8);
  CHECK(wider.per_candidate[1].seed == (cfg.seed ^ 1u));

  CHECK_THROWS(greedy_search(builder, CandidateSpace{{}, {8}}, shape, cfg));
  CHECK_THROWS(greedy_search(builder, CandidateSpace{{m.frequency()}, {}}, shape, cfg));
  CHECK_THROWS(greedy_search(builder, CandidateSpace{{m.frequency()}, {7}}, shape, cfg));
}
