// speechforge/io.hpp

// Copyright 2026  SpeechForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "speechforge/types.hpp"

namespace sforge {

// RIFF/WAVE, PCM16 little-endian, mono. Samples are scaled by 1/32768 on
// read; write rounds to the nearest code and clamps to [-32768, 32767].
Waveform read_wav(const std::filesystem::path &path);
void write_wav(const std::filesystem::path &path, const Waveform &wav);

// In-memory variants used by the file versions and by tests.
Waveform parse_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav(const Waveform &wav);

// FMX1 matrix container:
//   "FMX1\0\0\0\0" | u32 rows | u32 cols | u8 dtype (0 = f32 LE) | 3 pad
//   | row-major payload
inline constexpr std::size_t kFmxHeaderSize = 20;

std::vector<std::uint8_t> encode_fmx(const Matrix &m);
Matrix parse_fmx(std::span<const std::uint8_t> bytes);

void write_fmx(const std::filesystem::path &path, const Matrix &m);
Matrix read_fmx(const std::filesystem::path &path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path);
void write_file_bytes(const std::filesystem::path &path,
                      std::span<const std::uint8_t> bytes);

}  // namespace sforge
