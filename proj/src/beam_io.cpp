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

#include "tbp/beam_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace tbp {

namespace {

constexpr char kCorner[] = "z_mm\\x_mm";

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw BeamFileError("cannot open " + path.string() + " for writing");
  return os;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             std::size_t column, const std::string& what) {
  std::ostringstream os;
  os << path.string() << ":" << line << ":" << column << ": " << what;
  throw BeamFileError(os.str());
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::string format_fixed9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

void write_beam_csv(const std::filesystem::path& path, const BeamPattern& bp,
                    const std::string& comment) {
  auto os = open_out(path);
  if (!comment.empty()) os << "# " << comment << '\n';
  os << kCorner;
  for (double x : bp.grid.lateral()) os << ',' << format_fixed9(x * 1e3);
  os << '\n';
  const auto z = bp.grid.depth();
  for (std::size_t v = 0; v < z.size(); ++v) {
    os << format_fixed9(z[v] * 1e3);
    for (std::size_t u = 0; u < bp.grid.lateral_count(); ++u) os << ',' << format_fixed9(bp.at(u, v));
    os << '\n';
  }
  if (!os) throw BeamFileError("short write to " + path.string());
}

BeamPattern read_beam_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw BeamFileError("cannot open beam file " + path.string());

  std::vector<double> lateral;
  std::vector<double> depth;
  std::vector<double> power;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    std::size_t column = 1;
    const auto number = [&](std::string_view cell) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        parse_fail(path, line_no, column, "expected a number, got '" + std::string(cell) + "'");
      return v;
    };
    if (!have_header) {
      if (cells.size() < 2) parse_fail(path, line_no, 1, "header row needs lateral coordinates");
      for (std::size_t c = 1; c < cells.size(); ++c) {
        column = c + 1;
        lateral.push_back(number(cells[c]) * 1e-3);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != lateral.size() + 1) {
      parse_fail(path, line_no, 1,
                 "expected " + std::to_string(lateral.size() + 1) + " cells, found " +
                     std::to_string(cells.size()));
    }
    depth.push_back(number(cells[0]) * 1e-3);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      column = c + 1;
      const double p = number(cells[c]);
      if (p < 0.0) parse_fail(path, line_no, column, "negative power");
      power.push_back(p);
    }
  }
  if (!have_header) parse_fail(path, line_no + 1, 1, "missing header row");
  if (depth.empty()) parse_fail(path, line_no + 1, 1, "no data rows");

  try {
    SimulationGrid grid(std::move(lateral), std::move(depth));
    return BeamPattern{std::move(grid), std::move(power), 0.0, std::nullopt};
  } catch (const std::invalid_argument& e) {
    throw BeamFileError(path.string() + ": invalid grid: " + e.what());
  }
}

void write_beam_pgm(const std::filesystem::path& path, const BeamPattern& bp, double floor_db,
                    const std::string& comment) {
  if (!(floor_db < 0.0)) throw std::invalid_argument("dB floor must be negative");
  const double peak = *std::max_element(bp.power.begin(), bp.power.end());
  auto os = open_out(path, std::ios::binary);
  os << "P5\n";
  if (!comment.empty()) os << "# " << comment << '\n';
  os << bp.grid.lateral_count() << ' ' << bp.grid.depth_count() << "\n255\n";
  std::vector<unsigned char> pixels(bp.power.size(), 0);
  if (peak > 0.0) {
    for (std::size_t k = 0; k < pixels.size(); ++k) {
      const double p = bp.power[k];
      if (!(p > 0.0)) continue;
      const double db = std::max(10.0 * std::log10(p / peak), floor_db);
      pixels[k] = static_cast<unsigned char>(std::lround(255.0 * (db - floor_db) / -floor_db));
    }
  }
  os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!os) throw BeamFileError("short write to " + path.string());
}

}  // namespace tbp
