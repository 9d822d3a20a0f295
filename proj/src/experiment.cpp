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

#include "tbp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "tbp/beam_io.hpp"

namespace tbp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kMm = 1e-3;
constexpr double kCm = 1e-2;
constexpr double kMHz = 1e6;
constexpr double kUs = 1e-6;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// Compact decimal for file names: 2 -> "2", 4.5 -> "4.5".
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("short write to " + path.string());
}

// Stems such as "opt_f4.5mhz_a26" contain dots, so never use replace_extension on them.
fs::path with_suffix(const fs::path& stem, const char* suffix) {
  return fs::path(stem.string() + suffix);
}

std::vector<double> scaled(std::span<const double> v, double unit) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(x / unit);
  return out;
}

json delays_json(const DelayProfile& p) {
  const double period = 1.0 / p.frequency;
  return {{"aperture", p.aperture},
          {"frequency_mhz", p.frequency / kMHz},
          {"half_delays_us", scaled(p.half_delays, kUs)},
          {"half_delays_periods", scaled(p.half_delays, period)},
          {"full_delays_us", scaled(p.full(), kUs)}};
}

ElementResponseMap response_for(const ExperimentConfig& config, const ResponseCache& cache,
                                const SimulationGrid& grid, double frequency) {
  return cache.get(config.probe(), config.medium, grid, frequency,
                   config.subdivisions_for(frequency));
}

json block_json(const BlockStats& s) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"z_min_cm", s.z_min / kCm},      {"z_max_cm", s.z_max / kCm},
          {"mlw_mean_mm", num(s.mlw_mean / kMm)}, {"mlw_std_mm", num(s.mlw_std / kMm)},
          {"clp", num(s.clp)},                {"sll_mean_db", num(s.sll_mean)},
          {"sll_std_db", num(s.sll_std)},     {"sll_undefined_depths", s.sll_undefined}};
}

std::string csv_number(double v) { return std::isfinite(v) ? format_fixed9(v) : "undefined"; }

std::string label_cell(const json& labels, const char* key) {
  if (!labels.contains(key) || labels[key].is_null()) return "";
  const auto& v = labels[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return short_number(v.get<double>());
}

double max_pointwise_rel(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a[k] - b[k]) / std::abs(b[k]));
  return worst;
}

}  // namespace

json provenance(const ExperimentConfig& config) {
  return {{"tool", "tbp"},
          {"version", kToolVersion},
          {"config_hash", hex64(config.hash())},
          {"seed", config.swarm.seed}};
}

std::string provenance_line(const ExperimentConfig& config) {
  return std::string("tbp ") + kToolVersion + " config=" + hex64(config.hash()) +
         " seed=" + std::to_string(config.swarm.seed);
}

void write_beam_files(const fs::path& stem, const BeamPattern& bp, const ExperimentConfig& config,
                      const json& labels) {
  const std::string line = provenance_line(config);
  write_beam_csv(with_suffix(stem, ".csv"), bp, line);
  write_beam_pgm(with_suffix(stem, ".pgm"), bp, config.pgm_floor_db, line);
  json meta = labels;
  meta["provenance"] = provenance(config);
  meta["grid"] = {{"lateral_count", bp.grid.lateral_count()},
                  {"depth_count", bp.grid.depth_count()},
                  {"depth_min_mm", bp.grid.depth().front() / kMm},
                  {"depth_max_mm", bp.grid.depth().back() / kMm}};
  if (bp.provenance) meta["delays"] = delays_json(*bp.provenance);
  write_text(with_suffix(stem, ".json"), meta.dump(2) + "\n");
}

std::vector<fs::path> cmd_simulate(const ExperimentConfig& config, const SimulateRequest& request,
                                   const ResponseCache& cache) {
  const double frequency = request.frequency.value_or(config.sweep.frequency);
  const auto grid = config.build_grid();
  const auto map = response_for(config, cache, grid, frequency);
  const fs::path dir = config.output_dir / "simulate";
  std::vector<fs::path> written;

  if (request.half_delays) {
    const auto& half = *request.half_delays;
    const int aperture = static_cast<int>(2 * half.size());
    if (request.aperture && *request.aperture != aperture)
      throw ConfigError("--aperture does not match the number of explicit delays");
    const DelayProfile profile{aperture, half, frequency};
    const auto bp = synthesize(map, profile);
    const fs::path stem =
        dir / ("explicit_f" + short_number(frequency / kMHz) + "mhz_a" + std::to_string(aperture));
    write_beam_files(stem, bp, config,
                     {{"kind", "explicit"}, {"aperture", aperture}, {"focal_depth_cm", nullptr}});
    written.push_back(with_suffix(stem, ".csv"));
    return written;
  }

  const std::vector<double> focals =
      request.focal_depth ? std::vector<double>{*request.focal_depth} : config.sweep.focal_depths;
  const std::vector<int> apertures =
      request.aperture ? std::vector<int>{*request.aperture} : config.sweep.apertures;
  for (double focal : focals) {
    for (int aperture : apertures) {
      const auto profile = standard_focal_law(config.probe(), aperture, focal,
                                              config.medium.sound_speed, frequency);
      const auto bp = synthesize(map, profile);
      const fs::path stem = dir / ("std_z" + short_number(focal / kCm) + "cm_a" +
                                   std::to_string(aperture));
      write_beam_files(stem, bp, config,
                       {{"kind", "standard"}, {"aperture", aperture}, {"focal_depth_cm", focal / kCm}});
      written.push_back(with_suffix(stem, ".csv"));
    }
  }
  return written;
}

json optimization_json(const OptimizationResult& result, const ExperimentConfig& config) {
  json candidates = json::array();
  for (const auto& c : result.per_candidate) {
    candidates.push_back({{"frequency_mhz", c.frequency / kMHz},
                          {"aperture", c.aperture},
                          {"objective", c.objective},
                          {"seed", c.seed},
                          {"half_delays_us", scaled(c.half_delays, kUs)},
                          {"half_delays_periods", scaled(c.half_delays, 1.0 / c.frequency)}});
  }
  const DelayProfile best = result.best_profile();
  return {{"provenance", provenance(config)},
          {"config", config.to_json()},
          {"seed", config.swarm.seed},
          {"best",
           {{"frequency_mhz", result.best_frequency / kMHz},
            {"aperture", result.best_aperture},
            {"objective", result.best_objective},
            {"half_delays_s", result.best_half_delays},
            {"half_delays_periods", scaled(result.best_half_delays, 1.0 / result.best_frequency)},
            {"delays", delays_json(best)}}},
          {"candidates", candidates},
          {"trace", result.objective_trace}};
}

OptimizationResult cmd_optimize(const ExperimentConfig& config, const ResponseCache& cache) {
  config.validate();
  const auto grid = config.build_grid();
  const auto result = greedy_search(
      [&](double f) { return response_for(config, cache, grid, f); }, config.candidates,
      config.target, config.swarm, config.objective_mask);

  const fs::path dir = config.output_dir / "optimize";
  write_text(dir / "result.json", optimization_json(result, config).dump(2) + "\n");

  // Optimised beams per candidate, and the delay profiles next to the
  // standard laws of the same aperture.
  std::ostringstream delays;
  delays << "# " << provenance_line(config) << "\n";
  delays << "profile,frequency_mhz,aperture,element,lateral_mm,delay_us\n";
  std::map<double, ElementResponseMap> maps;
  for (const auto& c : result.per_candidate) {
    auto it = maps.find(c.frequency);
    if (it == maps.end()) it = maps.emplace(c.frequency, response_for(config, cache, grid, c.frequency)).first;
    const DelayProfile profile{c.aperture, c.half_delays, c.frequency};
    const auto bp = synthesize(it->second, profile);
    const std::string tag =
        "opt_f" + short_number(c.frequency / kMHz) + "mhz_a" + std::to_string(c.aperture);
    write_beam_files(dir / tag, bp, config,
                     {{"kind", "optimized"},
                      {"aperture", c.aperture},
                      {"focal_depth_cm", nullptr},
                      {"objective", c.objective}});

    const auto emit = [&](const std::string& name, const DelayProfile& p) {
      const auto full = p.full();
      for (int a = 0; a < p.aperture; ++a) {
        const int element = a - p.aperture / 2;
        delays << name << ',' << short_number(p.frequency / kMHz) << ',' << p.aperture << ','
               << element << ',' << format_fixed9(config.probe().element_center(element) / kMm)
               << ',' << format_fixed9(full[a] / kUs) << '\n';
      }
    };
    emit(tag, profile);
    for (double focal : config.sweep.focal_depths) {
      emit("std_z" + short_number(focal / kCm) + "cm",
           standard_focal_law(config.probe(), c.aperture, focal, config.medium.sound_speed,
                              c.frequency));
    }
  }
  write_text(dir / "delay_profiles.csv", delays.str());
  return result;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "name,kind,focal_depth_cm,aperture";
  for (const char* block : {"interest", "extended"}) {
    for (const char* col : {"mlw_mean_mm", "mlw_std_mm", "clp", "sll_mean_db", "sll_std_db"})
      os << ',' << block << '_' << col;
  }
  os << '\n';
  for (const auto& row : rows) {
    os << row.name << ',' << label_cell(row.labels, "kind") << ','
       << label_cell(row.labels, "focal_depth_cm") << ',' << label_cell(row.labels, "aperture");
    for (const BlockStats* s : {&row.report.interest, &row.report.extended}) {
      os << ',' << csv_number(s->mlw_mean / kMm) << ',' << csv_number(s->mlw_std / kMm) << ','
         << csv_number(s->clp) << ',' << csv_number(s->sll_mean) << ','
         << csv_number(s->sll_std);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<ReportRow> cmd_evaluate(const std::vector<fs::path>& beams,
                                    const ExperimentConfig& config) {
  std::vector<ReportRow> rows;
  json out_rows = json::array();
  for (const auto& path : beams) {
    const BeamPattern bp = read_beam_csv(path);
    json labels = json::object();
    auto side = path;
    side.replace_extension(".json");
    if (fs::exists(side)) {
      std::ifstream is(side);
      const json meta = json::parse(is, nullptr, false);
      if (meta.is_discarded()) throw BeamFileError(side.string() + ": malformed JSON sidecar");
      for (const char* key : {"kind", "aperture", "focal_depth_cm"})
        if (meta.contains(key)) labels[key] = meta[key];
    }
    ReportRow row{path.stem().string(), labels, report(bp, config.metrics)};

    json series = json::array();
    for (const auto& s : row.report.series) {
      series.push_back({{"depth_mm", s.depth / kMm},
                        {"mlw_mm", s.mlw / kMm},
                        {"sll_db", s.sll ? json(*s.sll) : json(nullptr)}});
    }
    out_rows.push_back({{"name", row.name},
                        {"labels", labels},
                        {"interest", block_json(row.report.interest)},
                        {"extended", block_json(row.report.extended)},
                        {"series", series}});
    rows.push_back(std::move(row));
  }
  write_text(config.output_dir / "report.csv",
             "# " + provenance_line(config) + "\n" + report_csv(rows));
  const json doc = {{"provenance", provenance(config)},
                    {"epsilon", config.metrics.epsilon},
                    {"rows", out_rows}};
  write_text(config.output_dir / "report.json", doc.dump(2) + "\n");
  return rows;
}

std::vector<ReportRow> cmd_compare(const std::vector<fs::path>& beams,
                                   const ExperimentConfig& config) {
  auto rows = cmd_evaluate(beams, config);
  std::ostringstream os;
  os << "# " << provenance_line(config) << "\n";
  os << "name,reference,block,metric,value,reference_value,difference\n";
  if (!rows.empty()) {
    const auto& ref = rows.front();
    const auto metrics = [](const BlockStats& s) {
      return std::vector<std::pair<const char*, double>>{{"mlw_mean_mm", s.mlw_mean / kMm},
                                                         {"mlw_std_mm", s.mlw_std / kMm},
                                                         {"clp", s.clp},
                                                         {"sll_mean_db", s.sll_mean},
                                                         {"sll_std_db", s.sll_std}};
    };
    for (const auto& row : rows) {
      for (const auto& [block, stats, ref_stats] :
           {std::tuple{"interest", &row.report.interest, &ref.report.interest},
            std::tuple{"extended", &row.report.extended, &ref.report.extended}}) {
        const auto mine = metrics(*stats);
        const auto theirs = metrics(*ref_stats);
        for (std::size_t m = 0; m < mine.size(); ++m) {
          os << row.name << ',' << ref.name << ',' << block << ',' << mine[m].first << ','
             << csv_number(mine[m].second) << ',' << csv_number(theirs[m].second) << ','
             << csv_number(mine[m].second - theirs[m].second) << '\n';
        }
      }
    }
  }
  write_text(config.output_dir / "compare.csv", os.str());
  return rows;
}

json ValidationSummary::to_json() const {
  return {{"passed", passed},
          {"tolerance", tolerance},
          {"trials", trials},
          {"max_relative_error",
           {{"time_vs_frequency", oracle_max_rel},
            {"crossterm_vs_modulus", crossterm_max_rel},
            {"global_shift", shift_max_rel},
            {"period_shift", period_max_rel},
            {"mirror_symmetry", mirror_max_rel}}}};
}

ValidationSummary cmd_validate(const ExperimentConfig& config, int trials, double tolerance,
                               const ResponseCache& cache) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be non-negative");
  const double f = config.sweep.frequency;
  const auto grid = config.build_grid();
  const auto map = response_for(config, cache, grid, f);
  const auto probe = config.probe();
  const int subdivisions = map.subdivisions();
  const double period = 1.0 / f;
  std::mt19937_64 rng(config.swarm.seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const auto random_profile = [&](int aperture) {
    DelayProfile p{aperture, {}, f};
    for (int i = 0; i < aperture / 2; ++i) p.half_delays.push_back(uniform() * period);
    return p;
  };

  ValidationSummary s;
  s.tolerance = tolerance;
  s.trials = trials;

  // Time-domain oracle at random grid points, aperture 8 (or the probe, if smaller).
  {
    const int aperture = std::min(8, probe.num_elements());
    const auto profile = random_profile(aperture);
    const auto bp = synthesize(map, profile);
    const auto full = profile.full();
    std::vector<double> freq, time;
    for (int t = 0; t < trials; ++t) {
      const std::size_t u = rng() % grid.lateral_count();
      const std::size_t v = rng() % grid.depth_count();
      freq.push_back(bp.at(u, v));
      time.push_back(2.0 * time_domain_power(probe, config.medium, grid.lateral()[u],
                                             grid.depth()[v], full, f, 64, subdivisions));
    }
    s.oracle_max_rel = max_pointwise_rel(time, freq);
  }

  const int max_aperture = std::min(16, probe.num_elements());
  for (int t = 0; t < trials; ++t) {
    const int aperture = 2 * (1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_aperture / 2)));
    const auto profile = random_profile(aperture);
    const auto bound = coherent_bound(map, aperture);
    const auto rel = [&bound](const std::vector<double>& x, const std::vector<double>& y) {
      return bounded_difference(x, y, bound);
    };
    const auto a = synthesize(map, profile);
    const auto b = synthesize_crossterm(map, profile);
    s.crossterm_max_rel = std::max(s.crossterm_max_rel, rel(b.power, a.power));

    for (double tau : {0.37 * period, -2.1 * period}) {
      auto shifted = profile;
      for (double& r : shifted.half_delays) r += tau;
      s.shift_max_rel = std::max(s.shift_max_rel, rel(synthesize(map, shifted).power, a.power));
    }
    auto wrapped = profile;
    for (double& r : wrapped.half_delays)
      r += static_cast<double>(static_cast<int>(rng() % 7) - 3) * period;
    s.period_max_rel = std::max(s.period_max_rel, rel(synthesize(map, wrapped).power, a.power));

    std::vector<double> mirrored(a.power.size());
    const std::size_t last = grid.lateral_count() - 1;
    for (std::size_t v = 0; v < grid.depth_count(); ++v)
      for (std::size_t u = 0; u <= last; ++u) mirrored[grid.index(u, v)] = a.at(last - u, v);
    s.mirror_max_rel = std::max(s.mirror_max_rel, rel(mirrored, a.power));
  }

  s.passed = s.oracle_max_rel <= tolerance && s.crossterm_max_rel <= tolerance &&
             s.shift_max_rel <= tolerance && s.period_max_rel <= tolerance &&
             s.mirror_max_rel <= tolerance;
  json doc = s.to_json();
  doc["provenance"] = provenance(config);
  write_text(config.output_dir / "validate.json", doc.dump(2) + "\n");
  return s;
}

}  // namespace tbp
