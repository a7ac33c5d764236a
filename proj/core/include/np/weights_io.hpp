/* Copyright 2026 The Neural Pathways Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "np/mlp.hpp"

namespace np {

/// Current version of the weights file format.
inline constexpr std::uint32_t kWeightsFormatVersion = 1;

/// Binary layout, all integers and floats little-endian:
///
///   "NPW1"  u32 version  u8 activation  u32 layer_count
///   per layer: u32 d_in  u32 d_out  u8 has_slopes
///              f64 weight[d_out * d_in] (row-major)  f64 bias[d_out]  f64 slopes[d_out]?
///   u32 crc32 of every preceding byte
std::vector<std::uint8_t> encode_weights(const MlpParams& params);
/// Throws FormatError on a bad magic, version, checksum or layout.
MlpParams decode_weights(std::span<const std::uint8_t> bytes);

void save_weights(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_weights(const std::filesystem::path& path);

/// Raw file contents; throws IoError.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace np
