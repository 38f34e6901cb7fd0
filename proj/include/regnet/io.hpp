// Copyright 2026 The RegNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "regnet/linop.hpp"
#include "regnet/network.hpp"

namespace regnet {

// "RGN1" container, little-endian:
//   char[4] "RGN1" | u32 version | u64 rows | u64 cols
//   f64 matrix[rows * cols] (row-major)
//   u64 r | f64 sigma[r] | f64 u[r * cols] | f64 v[r * rows]
//   u64 meta_len | meta bytes (key=value lines)
// u[n * cols + i] is component i of image-space vector u_n, v likewise. Plain
// arrays (phantom sets, sinograms) have r = 0.
struct ArrayRecord {
  Matrix matrix;
  Vector singular_values;
  Matrix image_vectors;  // cols x r
  Matrix data_vectors;   // rows x r
  std::string metadata;
};

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::uint32_t kModelVersion = 1;

std::string encode_container(const ArrayRecord& record);
ArrayRecord decode_container(std::string_view bytes);

void write_container(const std::filesystem::path& path, const ArrayRecord& record);
ArrayRecord read_container(const std::filesystem::path& path);

void save_operator(const std::filesystem::path& path, const SvdOperator& op,
                   const std::string& metadata = {});
SvdOperator load_operator(const std::filesystem::path& path, double rank_tol = kDefaultRankTol,
                          std::string* metadata = nullptr);

// "RGNN" model file, little-endian:
//   char[4] "RGNN" | u32 version | u64 side | u32 residual_skip | u64 layers
//   per layer: u64 in_channels | u64 out_channels
//   u64 parameter_count | f64 parameters[...] | u64 init_seed
//   u64 meta_len | meta bytes
std::string encode_model(const NetworkParams& params, const std::string& metadata = {});
NetworkParams decode_model(std::string_view bytes, std::string* metadata = nullptr);

void save_model(const std::filesystem::path& path, const NetworkParams& params,
                const std::string& metadata = {});
NetworkParams load_model(const std::filesystem::path& path, std::string* metadata = nullptr);

// Binary 16-bit PGM (P5, maxval 65535, most significant byte first). Values
// are clamped to [0, 1] and mapped linearly; image row 0 (y = -1) is written
// last so that y points up. `comment` lines are embedded in the header.
std::string encode_pgm16(const Vector& image, std::size_t side, const std::string& comment = {});
void write_pgm16(const std::filesystem::path& path, const Vector& image, std::size_t side,
                 const std::string& comment = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace regnet
