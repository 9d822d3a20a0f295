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

#include "tbp/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void throw_singular(double x, double z) {
  std::ostringstream os;
  os << "field point (x=" << x << " m, z=" << z << " m) coincides with a source point";
  throw SingularityError(os.str());
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

}  // namespace

ProbeGeometry::ProbeGeometry(int num_elements, double pitch, double element_width)
    : num_elements_(num_elements), pitch_(pitch), element_width_(element_width) {
  if (num_elements < 2 || num_elements % 2 != 0)
    throw std::invalid_argument("probe needs an even number of elements >= 2");
  if (!(pitch > 0.0)) throw std::invalid_argument("probe pitch must be positive");
  if (!(element_width > 0.0) || element_width > pitch)
    throw std::invalid_argument("element width must lie in (0, pitch]");
}

double ProbeGeometry::element_center(int i) const {
  if (i < -half_count() || i >= half_count())
    throw std::out_of_range("element index outside the probe");
  return (i + 0.5) * pitch_;
}

void Medium::validate() const {
  if (!(sound_speed > 0.0)) throw std::invalid_argument("sound speed must be positive");
  if (!(attenuation >= 0.0)) throw std::invalid_argument("attenuation must be non-negative");
}

SimulationGrid::SimulationGrid(std::vector<double> lateral, std::vector<double> depth)
    : lateral_(std::move(lateral)), depth_(std::move(depth)) {
  if (lateral_.empty() || depth_.empty()) throw std::invalid_argument("grid axes must be nonempty");
  if (!strictly_increasing(lateral_) || !strictly_increasing(depth_))
    throw std::invalid_argument("grid coordinates must be strictly increasing");
  if (!(depth_.front() > 0.0))
    throw std::invalid_argument("grid depths must be positive (z = 0 is singular)");
}

std::size_t SimulationGrid::center_column() const {
  auto it = std::find(lateral_.begin(), lateral_.end(), 0.0);
  if (it == lateral_.end()) throw std::invalid_argument("grid has no central line x = 0");
  return static_cast<std::size_t>(it - lateral_.begin());
}

SimulationGrid build_grid(const ProbeGeometry& probe, double depth_min, double depth_max,
                          double depth_step) {
  if (!(depth_min > 0.0)) throw std::invalid_argument("depth_min must be positive");
  if (!(depth_max > depth_min)) throw std::invalid_argument("depth_max must exceed depth_min");
  if (!(depth_step > 0.0)) throw std::invalid_argument("depth_step must be positive");

  const int half = 4 * probe.half_count();
  std::vector<double> lateral;
  lateral.reserve(static_cast<std::size_t>(2 * half + 1));
  for (int u = -half; u <= half; ++u) lateral.push_back(u * probe.pitch() / 4.0);

  // Index-based stepping so depths carry no accumulated rounding drift.
  std::vector<double> depth;
  const double slack = 1e-9 * depth_step;
  for (long v = 0;; ++v) {
    const double z = depth_min + static_cast<double>(v) * depth_step;
    if (z > depth_max + slack) break;
    depth.push_back(z);
  }
  return SimulationGrid(std::move(lateral), std::move(depth));
}

double attenuation_factor(double path_length, double frequency, const Medium& medium) {
  const double mhz = frequency * 1e-6;
  const double cm = path_length * 1e2;
  return std::pow(10.0, -medium.attenuation * mhz * cm / 20.0);
}

int default_subdivisions(const ProbeGeometry& probe, const Medium& medium, double frequency) {
  const double max_width = medium.sound_speed / frequency / 8.0;
  return std::max(1, static_cast<int>(std::ceil(probe.element_width() / max_width - 1e-12)));
}

ElementResponseMap::ElementResponseMap(ProbeGeometry probe, Medium medium, SimulationGrid grid,
                                       double frequency, int subdivisions, std::vector<cplx> values)
    : probe_(probe),
      medium_(medium),
      grid_(std::move(grid)),
      frequency_(frequency),
      subdivisions_(subdivisions),
      values_(std::move(values)) {
  const auto expected = static_cast<std::size_t>(probe_.num_elements()) * grid_.size();
  if (values_.size() != expected)
    throw std::invalid_argument("response map size does not match probe and grid");
}

std::span<const cplx> ElementResponseMap::element(int i) const {
  const std::size_t n = grid_.size();
  return std::span<const cplx>(values_).subspan(probe_.slot(i) * n, n);
}

ElementResponseMap ElementResponseMap::scaled(double factor) const {
  std::vector<cplx> v = values_;
  for (auto& h : v) h *= factor;
  return ElementResponseMap(probe_, medium_, grid_, frequency_, subdivisions_, std::move(v));
}

std::vector<double> subelement_offsets(double element_width, int subdivisions) {
  // (s + 1/2 - S/2) * w is exactly antisymmetric in s -> S-1-s.
  const double w = element_width / subdivisions;
  std::vector<double> offsets(static_cast<std::size_t>(subdivisions));
  for (int s = 0; s < subdivisions; ++s) offsets[s] = (s + 0.5 - subdivisions / 2.0) * w;
  return offsets;
}

namespace {

// Sum over sub-elements of w * A(r) * exp(-2 pi j f r / c) / (2 pi r).
cplx point_response(double center, std::span<const double> offsets, double weight, double x,
                    double z, double frequency, const Medium& medium) {
  const double k = kTwoPi * frequency / medium.sound_speed;
  cplx acc{0.0, 0.0};
  for (double off : offsets) {
    const double r = std::hypot(x - (center + off), z);
    if (r == 0.0) throw_singular(x, z);
    const double amp = weight * attenuation_factor(r, frequency, medium) / (kTwoPi * r);
    acc += std::polar(amp, -k * r);
  }
  return acc;
}

}  // namespace

cplx element_point_response(const ProbeGeometry& probe, const Medium& medium, int element,
                            double x, double z, double frequency, int subdivisions) {
  if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
  const auto offsets = subelement_offsets(probe.element_width(), subdivisions);
  return point_response(probe.element_center(element), offsets,
                        probe.element_width() / subdivisions, x, z, frequency, medium);
}

ElementResponseMap element_frequency_response(const ProbeGeometry& probe, const Medium& medium,
                                              const SimulationGrid& grid, double frequency,
                                              int subdivisions) {
  if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
  if (!(frequency > 0.0)) throw std::invalid_argument("frequency must be positive");
  medium.validate();

  const auto offsets = subelement_offsets(probe.element_width(), subdivisions);
  const double weight = probe.element_width() / subdivisions;
  const auto lateral = grid.lateral();
  const auto depth = grid.depth();
  const std::size_t n = grid.size();

  std::vector<cplx> values(static_cast<std::size_t>(probe.num_elements()) * n);
  for (int i = -probe.half_count(); i < probe.half_count(); ++i) {
    const double center = probe.element_center(i);
    cplx* out = values.data() + probe.slot(i) * n;
    for (std::size_t v = 0; v < depth.size(); ++v)
      for (std::size_t u = 0; u < lateral.size(); ++u)
        out[grid.index(u, v)] =
            point_response(center, offsets, weight, lateral[u], depth[v], frequency, medium);
  }
  return ElementResponseMap(probe, medium, grid, frequency, subdivisions, std::move(values));
}

double time_domain_power(const ProbeGeometry& probe, const Medium& medium, double x, double z,
                         std::span<const double> delays, double frequency, int samples_per_period,
                         int subdivisions) {
  if (samples_per_period < 8) throw std::invalid_argument("need at least 8 samples per period");
  if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
  const auto active = static_cast<int>(delays.size());
  if (active < 1 || active > probe.num_elements())
    throw std::invalid_argument("delay count must be an active aperture within the probe");

  struct Path {
    double amplitude;
    double lag;  // seconds: transmit delay plus travel time
  };
  std::vector<Path> paths;
  const auto offsets = subelement_offsets(probe.element_width(), subdivisions);
  const double weight = probe.element_width() / subdivisions;
  for (int a = 0; a < active; ++a) {
    const double center = probe.element_center(a - active / 2);
    for (double off : offsets) {
      const double r = std::hypot(x - (center + off), z);
      if (r == 0.0) throw_singular(x, z);
      paths.push_back({weight * attenuation_factor(r, frequency, medium) / (kTwoPi * r),
                       delays[a] + r / medium.sound_speed});
    }
  }

  const double period = 1.0 / frequency;
  double sum_sq = 0.0;
  for (int k = 0; k < samples_per_period; ++k) {
    const double t = period * k / samples_per_period;
    double s = 0.0;
    for (const auto& p : paths) s += p.amplitude * std::cos(kTwoPi * frequency * (t - p.lag));
    sum_sq += s * s;
  }
  return sum_sq / samples_per_period;
}

}  // namespace tbp
