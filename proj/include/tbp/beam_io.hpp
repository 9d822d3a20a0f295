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

#ifndef TBP_BEAM_IO_HPP
#define TBP_BEAM_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "tbp/beam.hpp"

namespace tbp {

class BeamFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed 9-significant-digit scientific notation used in every text output.
std::string format_fixed9(double v);

/*
 * Beam CSV: optional leading "# ..." comment lines, then a header row
 * "z_mm\x_mm,<lateral mm>...", then one row per depth "<depth mm>,<power>...".
 * Powers are linear.
 */
void write_beam_csv(const std::filesystem::path& path, const BeamPattern& bp,
                    const std::string& comment = {});
BeamPattern read_beam_csv(const std::filesystem::path& path);

/// Binary 8-bit PGM in dB re the grid maximum, black at `floor_db` and below.
void write_beam_pgm(const std::filesystem::path& path, const BeamPattern& bp,
                    double floor_db = -40.0, const std::string& comment = {});

}  // namespace tbp

#endif  // TBP_BEAM_IO_HPP
