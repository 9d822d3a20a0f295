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

#ifndef TBP_BEAM_HPP
#define TBP_BEAM_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tbp/field.hpp"

namespace tbp {

/// A beam (or a metric) that has no usable power where one is required.
class DegenerateBeamError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * Symmetric transmit delays for a centred, even aperture.
 *
 * half_delays[i] is the delay of element i (and of its mirror -i-1) for
 * i = 0..aperture/2-1, i.e. element 0 is the innermost pair.
 */
struct DelayProfile {
  int aperture = 0;
  std::vector<double> half_delays;  // seconds
  double frequency = 0.0;           // Hz

  /// Per-element delays ordered from element -aperture/2 to aperture/2-1.
  std::vector<double> full() const;
  /// Same profile with each delay reduced into [0, 1/frequency).
  DelayProfile canonical() const;
  void validate() const;
};

/// Closed axis-aligned rectangle centred on x = 0.
struct PrescribedShape {
  double z_center = 17.5e-3;
  double z_length = 25e-3;
  double half_width = 0.5e-3;

  void validate(const SimulationGrid& grid) const;
};

struct BeamPattern {
  SimulationGrid grid;
  std::vector<double> power;  // depth-major, lateral-minor
  double frequency = 0.0;
  std::optional<DelayProfile> provenance;

  double at(std::size_t u, std::size_t v) const { return power[grid.index(u, v)]; }
  /// Power along the column x = 0, one value per depth.
  std::vector<double> central_line() const;
};

/// Palindromic expansion: [a, b] -> [b, a, a, b].
std::vector<double> expand_symmetric(std::span<const double> half_delays);

/// P = |sum_i H_i exp(-2 pi j R_i f)|^2 over the active elements.
BeamPattern synthesize(const ElementResponseMap& map, const DelayProfile& profile);

/// Same power through the pairwise expansion sum_{m,n} Re(H_m conj(H_n) exp(-j(phi_m - phi_n))).
BeamPattern synthesize_crossterm(const ElementResponseMap& map, const DelayProfile& profile);

/// (sum_i |H_i|)^2 over the active elements: the largest power any delay profile reaches at each point.
std::vector<double> coherent_bound(const ElementResponseMap& map, int aperture);

/// max_k |a_k - b_k| / bound_k, the rounding-aware relative difference of two patterns.
double bounded_difference(std::span<const double> a, std::span<const double> b,
                          std::span<const double> bound);

/// Single-focus law R_i = (d_max - d_i) / c with d_i the distance from element i to (0, focus).
DelayProfile standard_focal_law(const ProbeGeometry& probe, int aperture, double focal_depth,
                                double sound_speed, double frequency);

/// 1 inside the closed rectangle, 0 elsewhere; same flattening as BeamPattern::power.
std::vector<double> rect_target(const SimulationGrid& grid, const PrescribedShape& shape);

/// Which depths take part in the least-squares fit.
enum class ObjectiveMask {
  WholeGrid,
  FromTargetStart,  // depths above the target rectangle are ignored
};

/// Index of the first depth row used by the objective under `mask`.
std::size_t objective_first_depth(const SimulationGrid& grid, const PrescribedShape& shape,
                                  ObjectiveMask mask);

/**
 * sum_k (X_k / max X - G_k)^2 through synthesize().
 *
 * Rows with depth index below `first_depth` are excluded from both the
 * maximum and the sum.
 */
double ls_objective(const ElementResponseMap& map, std::span<const double> half_delays,
                    int aperture, std::span<const double> target, std::size_t first_depth = 0);

/**
 * Least-squares objective specialised for repeated evaluation.
 *
 * With palindromic delays the mirrored elements share a phase and the beam is
 * symmetric in x, so the responses are pre-summed per element pair and only
 * the x >= 0 half of the grid is synthesised; off-axis columns count twice.
 * Matches ls_objective() to rounding.
 */
class BeamObjective {
 public:
  BeamObjective(const ElementResponseMap& map, int aperture, std::span<const double> target,
                std::size_t first_depth = 0);

  double operator()(std::span<const double> half_delays) const;

  int dimension() const { return pairs_; }
  double period() const { return 1.0 / frequency_; }

 private:
  int pairs_;
  double frequency_;
  std::size_t points_;  // half-grid points
  std::vector<double> pair_re_;  // pairs_ x points_
  std::vector<double> pair_im_;
  std::vector<double> target_;
  std::vector<double> weight_;
};

}  // namespace tbp

#endif  // TBP_BEAM_HPP
