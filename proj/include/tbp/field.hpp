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

#ifndef TBP_FIELD_HPP
#define TBP_FIELD_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbp {

using cplx = std::complex<double>;

/// Raised when a field point coincides with a source point (r = 0).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * Linear array with 2N elements centred on the origin.
 *
 * Element index i runs over -N..N-1 and its centre sits at (i + 1/2) * pitch,
 * so elements i and -i-1 are mirror images about x = 0.
 */
class ProbeGeometry {
 public:
  ProbeGeometry(int num_elements, double pitch, double element_width);

  int num_elements() const { return num_elements_; }
  int half_count() const { return num_elements_ / 2; }
  double pitch() const { return pitch_; }
  double element_width() const { return element_width_; }

  /// Lateral centre of element i, i in [-N, N-1].
  double element_center(int i) const;

  /// Storage slot of element i (0 for the leftmost element).
  std::size_t slot(int i) const { return static_cast<std::size_t>(i + half_count()); }

 private:
  int num_elements_;
  double pitch_;
  double element_width_;
};

struct Medium {
  double sound_speed = 1540.0;  // m/s
  double attenuation = 0.5;     // dB / (MHz cm)

  void validate() const;
};

/// Rectangular sampling of the imaging plane; depth-major, lateral-minor.
class SimulationGrid {
 public:
  SimulationGrid() = default;
  SimulationGrid(std::vector<double> lateral, std::vector<double> depth);

  std::span<const double> lateral() const { return lateral_; }
  std::span<const double> depth() const { return depth_; }
  std::size_t lateral_count() const { return lateral_.size(); }
  std::size_t depth_count() const { return depth_.size(); }
  std::size_t size() const { return lateral_.size() * depth_.size(); }

  /// Unrolled index k = u + L * v with u re-based to 0..L-1.
  std::size_t index(std::size_t u, std::size_t v) const { return u + lateral_.size() * v; }

  /// Column holding x = 0, or throws if the grid has no central line.
  std::size_t center_column() const;

  bool operator==(const SimulationGrid&) const = default;

 private:
  std::vector<double> lateral_;
  std::vector<double> depth_;
};

SimulationGrid build_grid(const ProbeGeometry& probe, double depth_min, double depth_max,
                          double depth_step);

/// One-way amplitude loss 10^(-alpha f[MHz] r[cm] / 20).
double attenuation_factor(double path_length, double frequency, const Medium& medium);

/// Smallest subdivision count keeping each sub-element at most lambda/8 wide.
int default_subdivisions(const ProbeGeometry& probe, const Medium& medium, double frequency);

/**
 * Single-frequency response of every element over a grid.
 *
 * Values are stored element-major, then depth, then lateral, which is also
 * the on-disk order of the cache file.
 */
class ElementResponseMap {
 public:
  ElementResponseMap(ProbeGeometry probe, Medium medium, SimulationGrid grid, double frequency,
                     int subdivisions, std::vector<cplx> values);

  const ProbeGeometry& probe() const { return probe_; }
  const Medium& medium() const { return medium_; }
  const SimulationGrid& grid() const { return grid_; }
  double frequency() const { return frequency_; }
  int subdivisions() const { return subdivisions_; }

  /// Response of element i (i in [-N, N-1]) over the whole grid.
  std::span<const cplx> element(int i) const;
  std::span<const cplx> values() const { return values_; }

  /// Multiply every response by a real factor (used to probe scale invariance).
  ElementResponseMap scaled(double factor) const;

 private:
  ProbeGeometry probe_;
  Medium medium_;
  SimulationGrid grid_;
  double frequency_;
  int subdivisions_;
  std::vector<cplx> values_;
};

/// Lateral offsets of sub-element midpoints relative to the element centre.
std::vector<double> subelement_offsets(double element_width, int subdivisions);

/// Response of a single element at one point; throws SingularityError when r = 0.
cplx element_point_response(const ProbeGeometry& probe, const Medium& medium, int element,
                            double x, double z, double frequency, int subdivisions);

ElementResponseMap element_frequency_response(const ProbeGeometry& probe, const Medium& medium,
                                              const SimulationGrid& grid, double frequency,
                                              int subdivisions);

/**
 * Mean power over one carrier period of the real transmitted field.
 *
 * Each sub-element emits cos(2 pi f (t - R_i - r/c)) weighted by the same
 * quadrature weight, attenuation and spreading as the frequency-domain
 * response, and the sum is squared and averaged over `samples_per_period`
 * uniform samples. For a pure tone this equals half the modulus-squared
 * frequency-domain power.
 *
 * `delays` holds one delay per active element, ordered from element -(A/2)
 * upwards with integer division, so a single delay drives element 0.
 */
double time_domain_power(const ProbeGeometry& probe, const Medium& medium, double x, double z,
                         std::span<const double> delays, double frequency, int samples_per_period,
                         int subdivisions);

}  // namespace tbp

#endif  // TBP_FIELD_HPP
