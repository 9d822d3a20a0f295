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

#include "tbp/metrics.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tbp {

namespace {

// Grid depths are compared with a tolerance well below any sensible depth step.
constexpr double kDepthTol = 1e-9;

std::size_t depth_index(const SimulationGrid& grid, double depth) {
  const auto d = grid.depth();
  const auto it = std::min_element(d.begin(), d.end(), [depth](double a, double b) {
    return std::abs(a - depth) < std::abs(b - depth);
  });
  if (std::abs(*it - depth) > kDepthTol) {
    std::ostringstream os;
    os << "depth " << depth << " m is not a grid depth";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(it - d.begin());
}

std::vector<std::size_t> depths_in(const SimulationGrid& grid, double z_min, double z_max) {
  std::vector<std::size_t> idx;
  const auto d = grid.depth();
  for (std::size_t v = 0; v < d.size(); ++v)
    if (d[v] >= z_min - kDepthTol && d[v] <= z_max + kDepthTol) idx.push_back(v);
  return idx;
}

double central_value(const BeamPattern& bp, std::size_t v) {
  const double p0 = bp.at(bp.grid.center_column(), v);
  if (!(p0 > 0.0)) {
    std::ostringstream os;
    os << "central-line power is zero at depth " << bp.grid.depth()[v] << " m";
    throw DegenerateBeamError(os.str());
  }
  return p0;
}

struct MeanStd {
  double mean;
  double std;
};

MeanStd mean_std(const std::vector<double>& xs, StdKind kind) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (xs.empty()) return {nan, nan};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  if (kind == StdKind::Sample) return {mean, xs.size() > 1 ? std::sqrt(ss / (n - 1)) : nan};
  return {mean, std::sqrt(ss / n)};
}

}  // namespace

void MetricConfig::validate(const SimulationGrid& grid) const {
  if (!(epsilon > 1.0)) throw std::invalid_argument("epsilon must exceed 1");
  if (!(z_min < z_max)) throw std::invalid_argument("z_min must be below z_max");
  const auto d = grid.depth();
  if (z_min < d.front() - kDepthTol || z_max > d.back() + kDepthTol)
    throw std::invalid_argument("metric depth range lies outside the grid");
}

double mlw_at_depth(const BeamPattern& bp, double depth, double epsilon) {
  const std::size_t v = depth_index(bp.grid, depth);
  const double threshold = central_value(bp, v) / epsilon;
  const auto x = bp.grid.lateral();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t u = 0; u < x.size(); ++u) {
    if (bp.at(u, v) >= threshold) {
      lo = std::min(lo, x[u]);
      hi = std::max(hi, x[u]);
    }
  }
  return hi - lo;
}

std::optional<double> sll_at_depth(const BeamPattern& bp, double depth, double epsilon) {
  const std::size_t v = depth_index(bp.grid, depth);
  const double p0 = central_value(bp, v);
  const double threshold = p0 / epsilon;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t u = 0; u < bp.grid.lateral_count(); ++u) {
    const double p = bp.at(u, v);
    if (p < threshold) {
      sum += p;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return 10.0 * std::log10(sum / static_cast<double>(n) / p0);
}

double clp(const BeamPattern& bp, double z_min, double z_max, ClpNormalization norm) {
  const auto idx = depths_in(bp.grid, z_min, z_max);
  if (idx.size() < 2) throw std::invalid_argument("CLP needs at least two depths in range");

  double peak = 0.0;
  if (norm == ClpNormalization::WholeGrid) {
    peak = *std::max_element(bp.power.begin(), bp.power.end());
  } else {
    for (std::size_t v : idx)
      for (std::size_t u = 0; u < bp.grid.lateral_count(); ++u) peak = std::max(peak, bp.at(u, v));
  }
  if (!(peak > 0.0)) throw DegenerateBeamError("CLP normaliser is zero");

  const auto z = bp.grid.depth();
  const std::size_t c = bp.grid.center_column();
  double integral = 0.0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const std::size_t a = idx[k - 1];
    const std::size_t b = idx[k];
    integral += 0.5 * (bp.at(c, a) + bp.at(c, b)) * (z[b] - z[a]);
  }
  return integral / (z[idx.back()] - z[idx.front()]) / peak;
}

BPReport report(const BeamPattern& bp, const MetricConfig& config) {
  config.validate(bp.grid);
  BPReport out;
  const auto z = bp.grid.depth();

  const auto block = [&](double lo, double hi) {
    BlockStats s;
    s.z_min = lo;
    s.z_max = hi;
    std::vector<double> mlw;
    std::vector<double> sll;
    for (const auto& sample : out.series) {
      if (sample.depth < lo - kDepthTol || sample.depth > hi + kDepthTol) continue;
      mlw.push_back(sample.mlw);
      if (sample.sll) sll.push_back(*sample.sll);
      else ++s.sll_undefined;
    }
    const auto m = mean_std(mlw, config.std_kind);
    const auto l = mean_std(sll, config.std_kind);
    s.mlw_mean = m.mean;
    s.mlw_std = m.std;
    s.sll_mean = l.mean;
    s.sll_std = l.std;
    s.clp = clp(bp, lo, hi, config.clp_norm);
    return s;
  };

  for (std::size_t v : depths_in(bp.grid, config.z_min, z.back()))
    out.series.push_back({z[v], mlw_at_depth(bp, z[v], config.epsilon),
                          sll_at_depth(bp, z[v], config.epsilon)});

  out.interest = block(config.z_min, config.z_max);
  out.extended = block(config.z_min, z.back());
  const int undefined = out.extended.sll_undefined;
  if (undefined > 0)
    std::clog << "note: SLL undefined at " << undefined
              << " depth(s) (no side-lobe region); excluded from aggregates\n";
  return out;
}

}  // namespace tbp
