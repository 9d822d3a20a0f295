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

#ifndef TBP_OPTIM_HPP
#define TBP_OPTIM_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tbp/beam.hpp"
#include "tbp/field.hpp"

namespace tbp {

struct SwarmConfig {
  int particles = 50;
  int iterations = 500;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp = 0.5;  // fraction of the period
  std::uint64_t seed = 20190101;

  void validate() const;
};

struct CandidateSpace {
  std::vector<double> frequencies;  // Hz
  std::vector<int> apertures;

  void validate(const ProbeGeometry& probe) const;
};

struct CandidateResult {
  double frequency = 0.0;
  int aperture = 0;
  double objective = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> half_delays;  // seconds, canonical
  std::vector<double> trace;
};

struct OptimizationResult {
  std::vector<double> best_half_delays;
  double best_frequency = 0.0;
  int best_aperture = 0;
  double best_objective = 0.0;
  std::vector<double> objective_trace;  // of the winning candidate
  std::vector<CandidateResult> per_candidate;

  DelayProfile best_profile() const { return {best_aperture, best_half_delays, best_frequency}; }
};

struct SwarmResult {
  std::vector<double> best;
  double value = 0.0;
  std::vector<double> trace;  // global best after each iteration
};

/// Reduces each delay into [0, period).
std::vector<double> wrap_to_torus(std::span<const double> delays, double period);

/// Signed displacement from `from` to `to` along the shorter arc, in [-period/2, period/2).
double shortest_arc(double from, double to, double period);

using Objective = std::function<double(std::span<const double>)>;

/**
 * Global-best particle swarm on the torus [0, period)^dimension.
 *
 * Attraction toward the personal and global bests follows the shortest arc,
 * velocities are clamped per coordinate to +-velocity_clamp * period and
 * positions are wrapped after every step. Evaluations that return a
 * non-finite value are skipped. The global best is updated in particle order
 * with ties going to the lower index, so runs are reproducible from the seed.
 */
SwarmResult pso_minimize(const Objective& objective, int dimension, double period,
                         const SwarmConfig& config);

using MapBuilder = std::function<ElementResponseMap(double frequency)>;

/// Exhaustive scan of (frequency, aperture) with a swarm over the half delays of each.
OptimizationResult greedy_search(const MapBuilder& map_builder, const CandidateSpace& space,
                                 const PrescribedShape& target, const SwarmConfig& config,
                                 ObjectiveMask mask = ObjectiveMask::FromTargetStart);

}  // namespace tbp

#endif  // TBP_OPTIM_HPP
