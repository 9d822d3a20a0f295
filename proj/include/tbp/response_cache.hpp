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

#ifndef TBP_RESPONSE_CACHE_HPP
#define TBP_RESPONSE_CACHE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "tbp/field.hpp"

namespace tbp {

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/*
 * On-disk layout (all integers and floats little-endian):
 *
 *   offset  size  field
 *        0     8  magic "TBPRMAP\0"
 *        8     4  format version (1)
 *       12     4  num_elements
 *       16     4  depth count
 *       20     4  lateral count
 *       24     4  subdivisions
 *       28     4  reserved (0)
 *       32     8  frequency, Hz (f64)
 *       40     8  probe hash (u64, see response_key)
 *       48     -  values: f64 re, f64 im; element-major, then depth, then lateral
 */
inline constexpr std::uint32_t kResponseCacheVersion = 1;
inline constexpr std::size_t kResponseCacheHeaderSize = 48;

/// Hash of everything that determines a response map besides frequency and subdivisions.
std::uint64_t response_key(const ProbeGeometry& probe, const Medium& medium,
                           const SimulationGrid& grid);

void write_response_map(const std::filesystem::path& path, const ElementResponseMap& map);

/// Reads a cache file written for exactly these inputs; throws CacheError on any mismatch.
ElementResponseMap read_response_map(const std::filesystem::path& path, const ProbeGeometry& probe,
                                     const Medium& medium, const SimulationGrid& grid,
                                     double frequency, int subdivisions);

/// Directory-backed memo of response maps keyed by inputs.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir, bool cache_only = false)
      : dir_(std::move(dir)), cache_only_(cache_only) {}

  std::filesystem::path file_for(const ProbeGeometry& probe, const Medium& medium,
                                 const SimulationGrid& grid, double frequency,
                                 int subdivisions) const;

  /// Loads a cached map or computes (and stores) it. In cache-only mode a miss throws.
  ElementResponseMap get(const ProbeGeometry& probe, const Medium& medium,
                         const SimulationGrid& grid, double frequency, int subdivisions) const;

  int hits() const { return hits_; }
  int misses() const { return misses_; }

 private:
  std::optional<std::filesystem::path> dir_;
  bool cache_only_;
  mutable int hits_ = 0;
  mutable int misses_ = 0;
};

}  // namespace tbp

#endif  // TBP_RESPONSE_CACHE_HPP
