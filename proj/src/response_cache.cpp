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

#include "tbp/response_cache.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "tbp/hash.hpp"

namespace tbp {

namespace {

constexpr std::array<char, 8> kMagic = {'T', 'B', 'P', 'R', 'M', 'A', 'P', '\0'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

}  // namespace

std::uint64_t response_key(const ProbeGeometry& probe, const Medium& medium,
                           const SimulationGrid& grid) {
  Fnv1a h;
  h.u64(static_cast<std::uint64_t>(probe.num_elements()))
      .f64(probe.pitch())
      .f64(probe.element_width())
      .f64(medium.sound_speed)
      .f64(medium.attenuation);
  h.u64(grid.lateral_count());
  for (double x : grid.lateral()) h.f64(x);
  h.u64(grid.depth_count());
  for (double z : grid.depth()) h.f64(z);
  return h.digest();
}

void write_response_map(const std::filesystem::path& path, const ElementResponseMap& map) {
  std::vector<unsigned char> buf;
  const auto values = map.values();
  buf.reserve(kResponseCacheHeaderSize + values.size() * 16);
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_u32(buf, kResponseCacheVersion);
  put_u32(buf, static_cast<std::uint32_t>(map.probe().num_elements()));
  put_u32(buf, static_cast<std::uint32_t>(map.grid().depth_count()));
  put_u32(buf, static_cast<std::uint32_t>(map.grid().lateral_count()));
  put_u32(buf, static_cast<std::uint32_t>(map.subdivisions()));
  put_u32(buf, 0);
  put_u64(buf, std::bit_cast<std::uint64_t>(map.frequency()));
  put_u64(buf, response_key(map.probe(), map.medium(), map.grid()));
  for (const cplx& v : values) {
    put_u64(buf, std::bit_cast<std::uint64_t>(v.real()));
    put_u64(buf, std::bit_cast<std::uint64_t>(v.imag()));
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write to a sibling and rename so readers never observe a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CacheError("cannot open " + tmp.string() + " for writing");
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw CacheError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ElementResponseMap read_response_map(const std::filesystem::path& path, const ProbeGeometry& probe,
                                     const Medium& medium, const SimulationGrid& grid,
                                     double frequency, int subdivisions) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CacheError("cannot open response map " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& what) {
    throw CacheError(path.string() + ": " + what);
  };
  if (buf.size() < kResponseCacheHeaderSize) fail("truncated header");
  if (std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) fail("bad magic");
  const unsigned char* p = buf.data();
  if (get_u32(p + 8) != kResponseCacheVersion) fail("unsupported version");
  if (get_u32(p + 12) != static_cast<std::uint32_t>(probe.num_elements()) ||
      get_u32(p + 16) != grid.depth_count() || get_u32(p + 20) != grid.lateral_count())
    fail("dimension mismatch");
  if (get_u32(p + 24) != static_cast<std::uint32_t>(subdivisions)) fail("subdivision mismatch");
  if (std::bit_cast<double>(get_u64(p + 32)) != frequency) fail("frequency mismatch");
  if (get_u64(p + 40) != response_key(probe, medium, grid)) fail("probe hash mismatch");

  const std::size_t count = static_cast<std::size_t>(probe.num_elements()) * grid.size();
  if (buf.size() != kResponseCacheHeaderSize + count * 16) fail("payload size mismatch");
  std::vector<cplx> values(count);
  const unsigned char* d = p + kResponseCacheHeaderSize;
  for (std::size_t k = 0; k < count; ++k, d += 16)
    values[k] = {std::bit_cast<double>(get_u64(d)), std::bit_cast<double>(get_u64(d + 8))};
  return ElementResponseMap(probe, medium, grid, frequency, subdivisions, std::move(values));
}

std::filesystem::path ResponseCache::file_for(const ProbeGeometry& probe, const Medium& medium,
                                              const SimulationGrid& grid, double frequency,
                                              int subdivisions) const {
  const auto key = Fnv1a()
                       .u64(response_key(probe, medium, grid))
                       .f64(frequency)
                       .u64(static_cast<std::uint64_t>(subdivisions))
                       .digest();
  std::ostringstream name;
  name << "rmap_" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
  return dir_.value_or(".") / name.str();
}

ElementResponseMap ResponseCache::get(const ProbeGeometry& probe, const Medium& medium,
                                      const SimulationGrid& grid, double frequency,
                                      int subdivisions) const {
  if (dir_) {
    const auto file = file_for(probe, medium, grid, frequency, subdivisions);
    if (std::filesystem::exists(file)) {
      ++hits_;
      return read_response_map(file, probe, medium, grid, frequency, subdivisions);
    }
  }
  if (cache_only_) {
    const std::string where = dir_ ? file_for(probe, medium, grid, frequency, subdivisions).string()
                                   : std::string("<no cache directory>");
    throw CacheError("response map not cached (cache-only mode): " + where);
  }
  ++misses_;
  auto map = element_frequency_response(probe, medium, grid, frequency, subdivisions);
  if (dir_) write_response_map(file_for(probe, medium, grid, frequency, subdivisions), map);
  return map;
}

}  // namespace tbp
