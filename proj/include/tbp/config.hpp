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

#ifndef TBP_CONFIG_HPP
#define TBP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tbp/beam.hpp"
#include "tbp/field.hpp"
#include "tbp/metrics.hpp"
#include "tbp/optim.hpp"

namespace tbp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Parses the TOML subset used by experiment files into a JSON object.
 *
 * Supported: comments, [table] headers (one level), bare keys, and values that
 * are numbers, booleans, basic "strings", or arrays of those (which may span
 * lines). Integers stay integers. Anything else is a ConfigError naming the
 * line.
 */
nlohmann::json parse_toml(std::string_view text);

struct GridSpec {
  double depth_min = 2e-3;
  double depth_max = 45e-3;
  double depth_step = 0.25e-3;
  int subdivisions = 0;  // 0: smallest count with sub-elements <= lambda / 8
};

/// Standard focal-law panel: every focal depth crossed with every aperture.
struct SweepSpec {
  std::vector<double> focal_depths{20e-3, 30e-3, 40e-3, 50e-3};
  std::vector<int> apertures{16, 20, 26, 30};
  double frequency = 4.5e6;
};

struct ExperimentConfig {
  int num_elements = 64;
  double pitch = 0.3e-3;
  double element_width = 0.3e-3;
  Medium medium;
  GridSpec grid;
  PrescribedShape target;
  ObjectiveMask objective_mask = ObjectiveMask::FromTargetStart;
  MetricConfig metrics;
  CandidateSpace candidates{{3.5e6, 4.5e6, 5.5e6}, {22, 26, 28}};
  SwarmConfig swarm;
  SweepSpec sweep;
  double pgm_floor_db = -40.0;
  std::filesystem::path output_dir = "tbp_out";
  std::filesystem::path cache_dir = "tbp_cache";

  ProbeGeometry probe() const { return {num_elements, pitch, element_width}; }
  SimulationGrid build_grid() const;
  int subdivisions_for(double frequency) const;

  /// Throws ConfigError if any sub-configuration violates its invariants.
  void validate() const;

  /// Canonical JSON echo in boundary units (mm, MHz, ...); also the hash input.
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
};

/// Applies keys from a parsed TOML document on top of the defaults.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tbp

#endif  // TBP_CONFIG_HPP
