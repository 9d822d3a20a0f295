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

#include "tbp/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tbp/hash.hpp"

namespace tbp {

using nlohmann::json;

namespace {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (!at_end()) {
      skip_space_and_comments();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_space();
        const std::string name = bare_key();
        skip_inline_space();
        expect(']');
        if (root.contains(name)) fail("duplicate table [" + name + "]");
        root[name] = json::object();
        table = &root[name];
      } else {
        const std::string key = bare_key();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        if (table->contains(key)) fail("duplicate key '" + key + "'");
        (*table)[key] = value();
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!at_end() && peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }

  void skip_space_and_comments() {
    for (;;) {
      skip_inline_space();
      skip_comment();
      if (!at_end() && (peek() == '\n' || peek() == '\r')) {
        ++pos_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (!at_end() && peek() == '\r') ++pos_;
    if (!at_end() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  json value() {
    if (at_end()) fail("missing value");
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number_value();
  }

  json string_value() {
    ++pos_;
    std::string out;
    while (!at_end() && peek() != '"') {
      if (peek() == '\n') fail("unterminated string");
      if (peek() == '\\') {
        ++pos_;
        if (at_end()) fail("unterminated escape");
        switch (peek()) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail("unsupported escape");
        }
        ++pos_;
        continue;
      }
      out += peek();
      ++pos_;
    }
    expect('"');
    return out;
  }

  json array_value() {
    ++pos_;
    json arr = json::array();
    for (;;) {
      skip_space_and_comments();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value());
      skip_space_and_comments();
      if (!at_end() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_space_and_comments();
      expect(']');
      return arr;
    }
  }

  json number_value() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                         peek() == '-' || peek() == '.' || peek() == '_'))
      ++pos_;
    std::string token;
    for (char ch : text_.substr(start, pos_ - start))
      if (ch != '_') token += ch;
    if (token.empty()) fail("expected a value");
    const bool integral = token.find_first_of(".eE") == std::string::npos;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first;
    if (integral) {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) return v;
    } else {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) return v;
    }
    fail("invalid value '" + token + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Reads typed keys out of one table and rejects anything it did not consume.
class Table {
 public:
  Table(const json& doc, const std::string& name) : name_(name) {
    if (doc.contains(name)) {
      if (!doc[name].is_object()) throw ConfigError("[" + name + "] must be a table");
      table_ = doc[name];
    }
  }

  ~Table() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : table_.items())
      if (!used_.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
  }

  void number(const char* key, double& out, double scale = 1.0) {
    if (const json* v = find(key)) {
      if (!v->is_number()) bad(key, "a number");
      out = v->get<double>() * scale;
    }
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) bad(key, "an integer");
      out = v->get<Int>();
    }
  }

  void text(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) bad(key, "a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const char* key, std::vector<double>& out, double scale = 1.0) {
    if (const json* v = find(key)) {
      if (!v->is_array()) bad(key, "an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) bad(key, "an array of numbers");
        out.push_back(e.get<double>() * scale);
      }
    }
  }

  void integers(const char* key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) bad(key, "an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) bad(key, "an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

 private:
  const json* find(const char* key) {
    used_.insert(key);
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &*it;
  }

  [[noreturn]] void bad(const char* key, const char* what) const {
    throw ConfigError(std::string("[") + name_ + "] " + key + " must be " + what);
  }

  std::string name_;
  json table_ = json::object();
  std::set<std::string> used_;
};

constexpr double kMm = 1e-3;
constexpr double kCm = 1e-2;
constexpr double kMHz = 1e6;

std::vector<double> scaled(const std::vector<double>& v, double factor) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(x / factor);
  return out;
}

}  // namespace

json parse_toml(std::string_view text) { return TomlReader(text).parse(); }

SimulationGrid ExperimentConfig::build_grid() const {
  return tbp::build_grid(probe(), grid.depth_min, grid.depth_max, grid.depth_step);
}

int ExperimentConfig::subdivisions_for(double frequency) const {
  return grid.subdivisions > 0 ? grid.subdivisions
                               : default_subdivisions(probe(), medium, frequency);
}

void ExperimentConfig::validate() const {
  try {
    const auto p = probe();
    medium.validate();
    if (grid.subdivisions < 0) throw std::invalid_argument("subdivisions must be >= 0");
    const auto g = build_grid();
    target.validate(g);
    metrics.validate(g);
    candidates.validate(p);
    swarm.validate();
    if (!(sweep.frequency > 0.0)) throw std::invalid_argument("sweep frequency must be positive");
    for (double f : sweep.focal_depths)
      if (!(f > 0.0)) throw std::invalid_argument("sweep focal depths must be positive");
    for (int a : sweep.apertures)
      if (a < 2 || a % 2 != 0 || a > p.num_elements())
        throw std::invalid_argument("sweep apertures must be even and within the probe");
    if (!(pgm_floor_db < 0.0)) throw std::invalid_argument("pgm floor must be negative dB");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["probe"] = {{"num_elements", num_elements},
                {"pitch_mm", pitch / kMm},
                {"element_width_mm", element_width / kMm}};
  j["medium"] = {{"sound_speed", medium.sound_speed},
                 {"attenuation_db_mhz_cm", medium.attenuation}};
  j["grid"] = {{"depth_min_mm", grid.depth_min / kMm},
               {"depth_max_mm", grid.depth_max / kMm},
               {"depth_step_mm", grid.depth_step / kMm},
               {"subdivisions", grid.subdivisions}};
  j["target"] = {{"z_center_cm", target.z_center / kCm},
                 {"z_length_cm", target.z_length / kCm},
                 {"half_width_mm", target.half_width / kMm},
                 {"objective_depths", objective_mask == ObjectiveMask::FromTargetStart
                                          ? "from_target_start"
                                          : "whole_grid"}};
  j["metrics"] = {{"epsilon", metrics.epsilon},
                  {"z_min_cm", metrics.z_min / kCm},
                  {"z_max_cm", metrics.z_max / kCm},
                  {"std", metrics.std_kind == StdKind::Population ? "population" : "sample"},
                  {"clp_max", metrics.clp_norm == ClpNormalization::DepthRange ? "depth_range"
                                                                               : "whole_grid"}};
  j["search"] = {{"frequencies_mhz", scaled(candidates.frequencies, kMHz)},
                 {"apertures", candidates.apertures}};
  j["swarm"] = {{"particles", swarm.particles},
                {"iterations", swarm.iterations},
                {"inertia", swarm.inertia},
                {"cognitive", swarm.cognitive},
                {"social", swarm.social},
                {"velocity_clamp", swarm.velocity_clamp},
                {"seed", swarm.seed}};
  j["sweep"] = {{"focal_depths_cm", scaled(sweep.focal_depths, kCm)},
                {"apertures", sweep.apertures},
                {"frequency_mhz", sweep.frequency / kMHz}};
  j["output"] = {{"pgm_floor_db", pgm_floor_db},
                 {"dir", output_dir.generic_string()},
                 {"cache_dir", cache_dir.generic_string()}};
  return j;
}

std::uint64_t ExperimentConfig::hash() const {
  // Paths are where results go, not what they are.
  json j = to_json();
  j.erase("output");
  j["pgm_floor_db"] = pgm_floor_db;
  return Fnv1a().bytes(j.dump()).digest();
}

ExperimentConfig config_from_json(const json& doc) {
  static const std::set<std::string> kTables = {"probe",  "medium", "grid",  "target", "metrics",
                                                "search", "swarm",  "sweep", "output"};
  if (!doc.is_object()) throw ConfigError("configuration must be a table");
  for (const auto& [name, _] : doc.items())
    if (!kTables.contains(name)) throw ConfigError("unknown table [" + name + "]");

  ExperimentConfig c;
  {
    Table t(doc, "probe");
    t.integer("num_elements", c.num_elements);
    t.number("pitch_mm", c.pitch, kMm);
    c.element_width = c.pitch;
    t.number("element_width_mm", c.element_width, kMm);
  }
  {
    Table t(doc, "medium");
    t.number("sound_speed", c.medium.sound_speed);
    t.number("attenuation_db_mhz_cm", c.medium.attenuation);
  }
  {
    Table t(doc, "grid");
    t.number("depth_min_mm", c.grid.depth_min, kMm);
    t.number("depth_max_mm", c.grid.depth_max, kMm);
    t.number("depth_step_mm", c.grid.depth_step, kMm);
    t.integer("subdivisions", c.grid.subdivisions);
  }
  {
    Table t(doc, "target");
    t.number("z_center_cm", c.target.z_center, kCm);
    t.number("z_length_cm", c.target.z_length, kCm);
    t.number("half_width_mm", c.target.half_width, kMm);
    std::string mask = "from_target_start";
    t.text("objective_depths", mask);
    if (mask == "from_target_start") c.objective_mask = ObjectiveMask::FromTargetStart;
    else if (mask == "whole_grid") c.objective_mask = ObjectiveMask::WholeGrid;
    else throw ConfigError("[target] objective_depths must be from_target_start or whole_grid");
  }
  {
    Table t(doc, "metrics");
    t.number("epsilon", c.metrics.epsilon);
    // The depths of interest follow a relocated target rectangle.
    if (doc.contains("target")) {
      c.metrics.z_min = c.target.z_center - c.target.z_length / 2;
      c.metrics.z_max = c.target.z_center + c.target.z_length / 2;
    }
    t.number("z_min_cm", c.metrics.z_min, kCm);
    t.number("z_max_cm", c.metrics.z_max, kCm);
    std::string kind = "population";
    t.text("std", kind);
    if (kind == "population") c.metrics.std_kind = StdKind::Population;
    else if (kind == "sample") c.metrics.std_kind = StdKind::Sample;
    else throw ConfigError("[metrics] std must be population or sample");
    std::string norm = "depth_range";
    t.text("clp_max", norm);
    if (norm == "depth_range") c.metrics.clp_norm = ClpNormalization::DepthRange;
    else if (norm == "whole_grid") c.metrics.clp_norm = ClpNormalization::WholeGrid;
    else throw ConfigError("[metrics] clp_max must be depth_range or whole_grid");
  }
  {
    Table t(doc, "search");
    t.numbers("frequencies_mhz", c.candidates.frequencies, kMHz);
    t.integers("apertures", c.candidates.apertures);
  }
  {
    Table t(doc, "swarm");
    t.integer("particles", c.swarm.particles);
    t.integer("iterations", c.swarm.iterations);
    t.number("inertia", c.swarm.inertia);
    t.number("cognitive", c.swarm.cognitive);
    t.number("social", c.swarm.social);
    t.number("velocity_clamp", c.swarm.velocity_clamp);
    std::int64_t seed = static_cast<std::int64_t>(c.swarm.seed);
    t.integer("seed", seed);
    if (seed < 0) throw ConfigError("[swarm] seed must be non-negative");
    c.swarm.seed = static_cast<std::uint64_t>(seed);
  }
  {
    Table t(doc, "sweep");
    t.numbers("focal_depths_cm", c.sweep.focal_depths, kCm);
    t.integers("apertures", c.sweep.apertures);
    t.number("frequency_mhz", c.sweep.frequency, kMHz);
  }
  {
    Table t(doc, "output");
    t.number("pgm_floor_db", c.pgm_floor_db);
    std::string dir = c.output_dir.string();
    std::string cache = c.cache_dir.string();
    t.text("dir", dir);
    t.text("cache_dir", cache);
    c.output_dir = dir;
    c.cache_dir = cache;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return config_from_json(parse_toml(ss.str()));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace tbp
