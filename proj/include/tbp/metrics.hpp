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

#ifndef TBP_METRICS_HPP
#define TBP_METRICS_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "tbp/beam.hpp"

namespace tbp {

enum class StdKind { Population, Sample };

/// Domain of the maximum that normalises the central-line power.
enum class ClpNormalization {
  DepthRange,  // all lateral positions, depths inside the evaluated range
  WholeGrid,
};

struct MetricConfig {
  double epsilon = std::pow(10.0, 0.6);  // -6 dB power threshold ratio
  double z_min = 5e-3;
  double z_max = 30e-3;
  StdKind std_kind = StdKind::Population;
  ClpNormalization clp_norm = ClpNormalization::DepthRange;

  void validate(const SimulationGrid& grid) const;
};

/// Main-lobe width: diameter of {x : P(x, z) >= P(0, z) / epsilon} on the lateral grid.
double mlw_at_depth(const BeamPattern& bp, double depth, double epsilon);

/// Mean side-lobe power relative to the central value, in dB; nullopt if every point is in the main lobe.
std::optional<double> sll_at_depth(const BeamPattern& bp, double depth, double epsilon);

/// Trapezoid mean of the normalised central-line power over [z_min, z_max].
double clp(const BeamPattern& bp, double z_min, double z_max,
           ClpNormalization norm = ClpNormalization::DepthRange);

struct BlockStats {
  double z_min = 0.0;
  double z_max = 0.0;
  double mlw_mean = 0.0;  // m
  double mlw_std = 0.0;
  double sll_mean = 0.0;  // dB
  double sll_std = 0.0;
  double clp = 0.0;
  int sll_undefined = 0;  // depths excluded from the SLL aggregates
};

struct DepthSample {
  double depth;
  double mlw;
  std::optional<double> sll;
};

struct BPReport {
  BlockStats interest;  // [z_min, z_max]
  BlockStats extended;  // [z_min, deepest grid depth]
  std::vector<DepthSample> series;  // every grid depth >= z_min
};

BPReport report(const BeamPattern& bp, const MetricConfig& config);

}  // namespace tbp

#endif  // TBP_METRICS_HPP
