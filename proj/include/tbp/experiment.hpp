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

#ifndef TBP_EXPERIMENT_HPP
#define TBP_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbp/config.hpp"
#include "tbp/metrics.hpp"
#include "tbp/optim.hpp"
#include "tbp/response_cache.hpp"

namespace tbp {

inline constexpr const char* kToolVersion = TBP_VERSION;

/// Stamp carried by every output file.
nlohmann::json provenance(const ExperimentConfig& config);
std::string provenance_line(const ExperimentConfig& config);

struct SimulateRequest {
  std::optional<double> focal_depth;  // m
  std::optional<int> aperture;
  std::optional<double> frequency;  // Hz; defaults to the sweep frequency
  std::optional<std::vector<double>> half_delays;  // s; overrides the focal law
};

/// Writes <stem>.csv, <stem>.pgm and <stem>.json for one beam.
void write_beam_files(const std::filesystem::path& stem, const BeamPattern& bp,
                      const ExperimentConfig& config, const nlohmann::json& labels);

/**
 * Standard focal-law beams (or one explicit delay profile) into <out>/simulate.
 *
 * Without a focal depth or aperture the configured sweep is simulated; a given
 * value pins that axis of the sweep. Returns the CSV paths written.
 */
std::vector<std::filesystem::path> cmd_simulate(const ExperimentConfig& config,
                                                const SimulateRequest& request,
                                                const ResponseCache& cache);

/// Greedy search plus result JSON, per-candidate beams and delay comparison into <out>/optimize.
OptimizationResult cmd_optimize(const ExperimentConfig& config, const ResponseCache& cache);

/// Result JSON exactly as cmd_optimize writes it.
nlohmann::json optimization_json(const OptimizationResult& result, const ExperimentConfig& config);

struct ReportRow {
  std::string name;
  nlohmann::json labels;  // from the beam's sidecar JSON when present
  BPReport report;
};

/// One row per beam file; writes <out>/report.csv and <out>/report.json.
std::vector<ReportRow> cmd_evaluate(const std::vector<std::filesystem::path>& beams,
                                    const ExperimentConfig& config);

/// cmd_evaluate plus <out>/compare.csv with each metric's difference from the first beam.
std::vector<ReportRow> cmd_compare(const std::vector<std::filesystem::path>& beams,
                                   const ExperimentConfig& config);

std::string report_csv(const std::vector<ReportRow>& rows);

struct ValidationSummary {
  bool passed = true;
  double tolerance = 0.0;
  int trials = 0;
  // The oracle error is pointwise; the others are relative to coherent_bound().
  double oracle_max_rel = 0.0;     // frequency vs 2 x time domain
  double crossterm_max_rel = 0.0;  // modulus vs pairwise expansion
  double shift_max_rel = 0.0;      // global delay shift
  double period_max_rel = 0.0;     // per-element whole-period shifts
  double mirror_max_rel = 0.0;     // P(x) vs P(-x) for palindromic delays

  nlohmann::json to_json() const;
};

/// Oracle and invariant harness; writes <out>/validate.json.
ValidationSummary cmd_validate(const ExperimentConfig& config, int trials, double tolerance,
                               const ResponseCache& cache);

}  // namespace tbp

#endif  // TBP_EXPERIMENT_HPP
