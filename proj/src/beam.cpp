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

#include "tbp/beam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_aperture(const ProbeGeometry& probe, int aperture) {
  if (aperture < 2 || aperture % 2 != 0)
    throw std::invalid_argument("aperture must be an even number of elements >= 2");
  if (aperture > probe.num_elements())
    throw std::invalid_argument("aperture exceeds the number of probe elements");
}

void check_profile(const ElementResponseMap& map, const DelayProfile& profile) {
  profile.validate();
  if (profile.frequency != map.frequency())
    throw std::invalid_argument("delay profile frequency does not match the response map");
  check_aperture(map.probe(), profile.aperture);
}

}  // namespace

std::vector<double> expand_symmetric(std::span<const double> half_delays) {
  const std::size_t n = half_delays.size();
  std::vector<double> full(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    full[n + i] = half_delays[i];
    full[n - 1 - i] = half_delays[i];
  }
  return full;
}

std::vector<double> DelayProfile::full() const { return expand_symmetric(half_delays); }

DelayProfile DelayProfile::canonical() const {
  DelayProfile out = *this;
  const double period = 1.0 / frequency;
  for (double& r : out.half_delays) {
    r = std::fmod(r, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
  }
  return out;
}

void DelayProfile::validate() const {
  if (aperture < 2 || aperture % 2 != 0)
    throw std::invalid_argument("aperture must be an even number of elements >= 2");
  if (half_delays.size() != static_cast<std::size_t>(aperture / 2))
    throw std::invalid_argument("half_delays must hold aperture/2 entries");
  if (!(frequency > 0.0)) throw std::invalid_argument("delay profile frequency must be positive");
  for (double r : half_delays)
    if (!std::isfinite(r)) throw std::invalid_argument("delays must be finite");
}

void PrescribedShape::validate(const SimulationGrid& grid) const {
  if (!(z_length > 0.0) || !(half_width > 0.0))
    throw std::invalid_argument("target rectangle needs positive length and half width");
  const auto depth = grid.depth();
  if (z_center - z_length / 2 < depth.front() || z_center + z_length / 2 > depth.back())
    throw std::invalid_argument("target rectangle extends outside the grid depth range");
}

std::vector<double> BeamPattern::central_line() const {
  const std::size_t c = grid.center_column();
  std::vector<double> line(grid.depth_count());
  for (std::size_t v = 0; v < line.size(); ++v) line[v] = at(c, v);
  return line;
}

BeamPattern synthesize(const ElementResponseMap& map, const DelayProfile& profile) {
  check_profile(map, profile);
  const auto delays = profile.full();
  const std::size_t n = map.grid().size();
  std::vector<cplx> field(n, cplx{0.0, 0.0});
  const int half = profile.aperture / 2;
  for (int a = 0; a < profile.aperture; ++a) {
    const cplx phase = std::polar(1.0, -kTwoPi * delays[a] * map.frequency());
    const auto h = map.element(a - half);
    for (std::size_t k = 0; k < n; ++k) field[k] += h[k] * phase;
  }
  std::vector<double> power(n);
  for (std::size_t k = 0; k < n; ++k) power[k] = std::norm(field[k]);
  return BeamPattern{map.grid(), std::move(power), map.frequency(), profile};
}

BeamPattern synthesize_crossterm(const ElementResponseMap& map, const DelayProfile& profile) {
  check_profile(map, profile);
  const auto delays = profile.full();
  const std::size_t n = map.grid().size();
  const int half = profile.aperture / 2;
  std::vector<double> power(n, 0.0);
  for (int m = 0; m < profile.aperture; ++m) {
    const auto hm = map.element(m - half);
    for (int q = 0; q < profile.aperture; ++q) {
      const auto hn = map.element(q - half);
      const double delta = kTwoPi * map.frequency() * (delays[m] - delays[q]);
      const double c = std::cos(delta);
      const double s = std::sin(delta);
      for (std::size_t k = 0; k < n; ++k) {
        const cplx hmn = hm[k] * std::conj(hn[k]);
        power[k] += hmn.real() * c + hmn.imag() * s;
      }
    }
  }
  for (double& p : power) p = std::max(p, 0.0);
  return BeamPattern{map.grid(), std::move(power), map.frequency(), profile};
}

std::vector<double> coherent_bound(const ElementResponseMap& map, int aperture) {
  check_aperture(map.probe(), aperture);
  std::vector<double> bound(map.grid().size(), 0.0);
  for (int a = -aperture / 2; a < aperture / 2; ++a) {
    const auto h = map.element(a);
    for (std::size_t k = 0; k < bound.size(); ++k) bound[k] += std::abs(h[k]);
  }
  for (double& b : bound) b *= b;
  return bound;
}

double bounded_difference(std::span<const double> a, std::span<const double> b,
                          std::span<const double> bound) {
  if (a.size() != b.size() || a.size() != bound.size())
    throw std::invalid_argument("pattern sizes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(bound[k] > 0.0)) throw std::invalid_argument("bound must be positive");
    worst = std::max(worst, std::abs(a[k] - b[k]) / bound[k]);
  }
  return worst;
}

DelayProfile standard_focal_law(const ProbeGeometry& probe, int aperture, double focal_depth,
                                double sound_speed, double frequency) {
  check_aperture(probe, aperture);
  if (!(focal_depth > 0.0)) throw std::invalid_argument("focal depth must be positive");
  if (!(sound_speed > 0.0)) throw std::invalid_argument("sound speed must be positive");

  const int pairs = aperture / 2;
  std::vector<double> distance(static_cast<std::size_t>(pairs));
  for (int i = 0; i < pairs; ++i) distance[i] = std::hypot(probe.element_center(i), focal_depth);
  const double farthest = *std::max_element(distance.begin(), distance.end());

  DelayProfile profile{aperture, {}, frequency};
  profile.half_delays.reserve(distance.size());
  for (double d : distance) profile.half_delays.push_back((farthest - d) / sound_speed);
  return profile;
}

std::vector<double> rect_target(const SimulationGrid& grid, const PrescribedShape& shape) {
  std::vector<double> g(grid.size(), 0.0);
  const auto lateral = grid.lateral();
  const auto depth = grid.depth();
  for (std::size_t v = 0; v < depth.size(); ++v) {
    if (std::abs(depth[v] - shape.z_center) > shape.z_length / 2) continue;
    for (std::size_t u = 0; u < lateral.size(); ++u)
      if (std::abs(lateral[u]) <= shape.half_width) g[grid.index(u, v)] = 1.0;
  }
  return g;
}

std::size_t objective_first_depth(const SimulationGrid& grid, const PrescribedShape& shape,
                                  ObjectiveMask mask) {
  if (mask == ObjectiveMask::WholeGrid) return 0;
  const double start = shape.z_center - shape.z_length / 2;
  const auto depth = grid.depth();
  // Same closed-interval test as rect_target, so the first kept row is the first target row.
  std::size_t v = 0;
  while (v < depth.size() && std::abs(depth[v] - shape.z_center) > shape.z_length / 2 &&
         depth[v] < start)
    ++v;
  return v;
}

double ls_objective(const ElementResponseMap& map, std::span<const double> half_delays,
                    int aperture, std::span<const double> target, std::size_t first_depth) {
  const auto& grid = map.grid();
  if (target.size() != grid.size())
    throw std::invalid_argument("target size does not match the grid");
  if (first_depth >= grid.depth_count())
    throw std::invalid_argument("objective excludes every depth");
  DelayProfile profile{aperture, {half_delays.begin(), half_delays.end()}, map.frequency()};
  const auto beam = synthesize(map, profile);
  const std::size_t begin = grid.index(0, first_depth);
  const double peak = *std::max_element(beam.power.begin() + static_cast<std::ptrdiff_t>(begin),
                                        beam.power.end());
  if (!(peak > 0.0)) throw DegenerateBeamError("beam pattern is identically zero");
  double sum = 0.0;
  for (std::size_t k = begin; k < target.size(); ++k) {
    const double r = beam.power[k] / peak - target[k];
    sum += r * r;
  }
  return sum;
}

BeamObjective::BeamObjective(const ElementResponseMap& map, int aperture,
                             std::span<const double> target, std::size_t first_depth)
    : pairs_(aperture / 2), frequency_(map.frequency()) {
  check_aperture(map.probe(), aperture);
  const auto& grid = map.grid();
  if (target.size() != grid.size()) throw std::invalid_argument("target size does not match the grid");
  if (first_depth >= grid.depth_count())
    throw std::invalid_argument("objective excludes every depth");

  const auto lateral = grid.lateral();
  const std::size_t center = grid.center_column();
  const std::size_t cols = lateral.size() - center;
  if (center + 1 != cols)
    throw std::invalid_argument("BeamObjective needs a lateral grid symmetric about x = 0");
  for (std::size_t k = 1; k < cols; ++k) {
    if (lateral[center + k] != -lateral[center - k])
      throw std::invalid_argument("BeamObjective needs a lateral grid symmetric about x = 0");
  }

  const std::size_t depths = grid.depth_count() - first_depth;
  points_ = cols * depths;
  pair_re_.resize(static_cast<std::size_t>(pairs_) * points_);
  pair_im_.resize(pair_re_.size());
  target_.resize(points_);
  weight_.resize(points_);
  for (std::size_t v = 0; v < depths; ++v) {
    for (std::size_t k = 0; k < cols; ++k) {
      const std::size_t p = v * cols + k;
      const std::size_t right = grid.index(center + k, v + first_depth);
      const std::size_t left = grid.index(center - k, v + first_depth);
      if (target[right] != target[left])
        throw std::invalid_argument("BeamObjective needs a target symmetric about x = 0");
      target_[p] = target[right];
      weight_[p] = k == 0 ? 1.0 : 2.0;
    }
  }
  for (int i = 0; i < pairs_; ++i) {
    const auto inner = map.element(i);
    const auto mirror = map.element(-i - 1);
    double* re = pair_re_.data() + static_cast<std::size_t>(i) * points_;
    double* im = pair_im_.data() + static_cast<std::size_t>(i) * points_;
    for (std::size_t v = 0; v < depths; ++v) {
      for (std::size_t k = 0; k < cols; ++k) {
        const std::size_t idx = grid.index(center + k, v + first_depth);
        const cplx h = inner[idx] + mirror[idx];
        re[v * cols + k] = h.real();
        im[v * cols + k] = h.imag();
      }
    }
  }
}

double BeamObjective::operator()(std::span<const double> half_delays) const {
  if (half_delays.size() != static_cast<std::size_t>(pairs_))
    throw std::invalid_argument("delay vector has the wrong dimension");
  std::vector<double> acc_re(points_, 0.0);
  std::vector<double> acc_im(points_, 0.0);
  for (int i = 0; i < pairs_; ++i) {
    const double phi = kTwoPi * half_delays[i] * frequency_;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double* re = pair_re_.data() + static_cast<std::size_t>(i) * points_;
    const double* im = pair_im_.data() + static_cast<std::size_t>(i) * points_;
    // (re + j im) * (c - j s)
    for (std::size_t k = 0; k < points_; ++k) {
      acc_re[k] += re[k] * c + im[k] * s;
      acc_im[k] += im[k] * c - re[k] * s;
    }
  }
  double peak = 0.0;
  for (std::size_t k = 0; k < points_; ++k) {
    acc_re[k] = acc_re[k] * acc_re[k] + acc_im[k] * acc_im[k];
    peak = std::max(peak, acc_re[k]);
  }
  if (!(peak > 0.0)) throw DegenerateBeamError("beam pattern is identically zero");
  const double inv = 1.0 / peak;
  double sum = 0.0;
  for (std::size_t k = 0; k < points_; ++k) {
    const double r = acc_re[k] * inv - target_[k];
    sum += weight_[k] * r * r;
  }
  return sum;
}

}  // namespace tbp
