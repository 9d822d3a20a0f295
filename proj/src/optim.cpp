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

#include "tbp/optim.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>

namespace tbp {

namespace {

// Uniform double in [0, 1) from the top 53 bits; unlike the standard
// distributions this is identical across standard library implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod of a tiny negative can round up to exactly `period`.
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace

void SwarmConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("swarm needs at least 2 particles");
  if (iterations < 1) throw std::invalid_argument("swarm needs at least 1 iteration");
  if (!(velocity_clamp > 0.0 && velocity_clamp <= 1.0))
    throw std::invalid_argument("velocity_clamp must lie in (0, 1]");
  if (!(inertia >= 0.0 && inertia < 1.0)) throw std::invalid_argument("inertia must lie in [0, 1)");
  if (!(cognitive > 0.0) || !(social > 0.0))
    throw std::invalid_argument("cognitive and social coefficients must be positive");
}

void CandidateSpace::validate(const ProbeGeometry& probe) const {
  if (frequencies.empty() || apertures.empty())
    throw std::invalid_argument("candidate space is empty");
  for (double f : frequencies)
    if (!(f > 0.0)) throw std::invalid_argument("candidate frequencies must be positive");
  for (int a : apertures) {
    if (a < 2 || a % 2 != 0 || a > probe.num_elements())
      throw std::invalid_argument("candidate apertures must be even and within the probe");
  }
}

std::vector<double> wrap_to_torus(std::span<const double> delays, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  std::vector<double> out(delays.size());
  std::transform(delays.begin(), delays.end(), out.begin(),
                 [period](double d) { return wrap(d, period); });
  return out;
}

double shortest_arc(double from, double to, double period) {
  double d = std::fmod(to - from, period);
  if (d >= period / 2) d -= period;
  else if (d < -period / 2) d += period;
  return d;
}

SwarmResult pso_minimize(const Objective& objective, int dimension, double period,
                         const SwarmConfig& config) {
  config.validate();
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");

  const auto dim = static_cast<std::size_t>(dimension);
  const auto count = static_cast<std::size_t>(config.particles);
  const double vmax = config.velocity_clamp * period;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(config.seed);

  std::vector<std::vector<double>> pos(count, std::vector<double>(dim));
  std::vector<std::vector<double>> vel(count, std::vector<double>(dim, 0.0));
  for (auto& p : pos)
    for (double& x : p) x = unit_uniform(rng) * period;
  auto pbest = pos;
  std::vector<double> pbest_val(count, kInf);

  std::size_t skipped = 0;
  const auto evaluate = [&](std::size_t i) {
    const double value = objective(pos[i]);
    if (!std::isfinite(value)) {
      ++skipped;
      return;
    }
    if (value < pbest_val[i]) {
      pbest_val[i] = value;
      pbest[i] = pos[i];
    }
  };
  std::size_t gbest = 0;
  const auto fold_global = [&] {
    // Sequential fold; strict comparison keeps the lowest index on ties.
    for (std::size_t i = 0; i < count; ++i)
      if (pbest_val[i] < pbest_val[gbest]) gbest = i;
  };

  for (std::size_t i = 0; i < count; ++i) evaluate(i);
  fold_global();
  if (!std::isfinite(pbest_val[gbest]))
    throw std::runtime_error("objective is non-finite at every initial particle");

  SwarmResult result;
  result.trace.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    const std::vector<double> leader = pbest[gbest];
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = unit_uniform(rng);
        const double r2 = unit_uniform(rng);
        double v = config.inertia * vel[i][d] +
                   config.cognitive * r1 * shortest_arc(pos[i][d], pbest[i][d], period) +
                   config.social * r2 * shortest_arc(pos[i][d], leader[d], period);
        v = std::clamp(v, -vmax, vmax);
        vel[i][d] = v;
        pos[i][d] = wrap(pos[i][d] + v, period);
      }
      evaluate(i);
    }
    fold_global();
    result.trace.push_back(pbest_val[gbest]);
  }
  if (skipped > 0)
    std::clog << "warning: pso_minimize discarded " << skipped
              << " non-finite objective evaluations\n";

  result.best = pbest[gbest];
  result.value = pbest_val[gbest];
  return result;
}

OptimizationResult greedy_search(const MapBuilder& map_builder, const CandidateSpace& space,
                                 const PrescribedShape& target, const SwarmConfig& config,
                                 ObjectiveMask mask) {
  if (space.frequencies.empty() || space.apertures.empty())
    throw std::invalid_argument("candidate space is empty");
  config.validate();

  OptimizationResult out;
  std::uint64_t index = 0;
  std::size_t best = 0;
  for (double f : space.frequencies) {
    const ElementResponseMap map = map_builder(f);
    space.validate(map.probe());
    target.validate(map.grid());
    const auto g = rect_target(map.grid(), target);
    const std::size_t first_depth = objective_first_depth(map.grid(), target, mask);
    for (int aperture : space.apertures) {
      const BeamObjective objective(map, aperture, g, first_depth);
      SwarmConfig cfg = config;
      cfg.seed = config.seed ^ index;
      const auto swarm = pso_minimize(
          [&objective](std::span<const double> r) { return objective(r); }, objective.dimension(),
          objective.period(), cfg);
      out.per_candidate.push_back(CandidateResult{f, aperture, swarm.value, cfg.seed,
                                                  wrap_to_torus(swarm.best, objective.period()),
                                                  swarm.trace});
      if (swarm.value < out.per_candidate[best].objective) best = out.per_candidate.size() - 1;
      ++index;
    }
  }
  const auto& winner = out.per_candidate[best];
  out.best_half_delays = winner.half_delays;
  out.best_frequency = winner.frequency;
  out.best_aperture = winner.aperture;
  out.best_objective = winner.objective;
  out.objective_trace = winner.trace;
  return out;
}

}  // namespace tbp
