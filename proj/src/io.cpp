// src/io.cpp

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

#include "speechforge/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace sforge {

namespace {

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

void put_u16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

void put_tag(std::vector<std::uint8_t> &out, const char *tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t off, const char *tag) {
  return std::memcmp(b.data() + off, tag, 4) == 0;
}

constexpr char kFmxMagic[8] = {'F', 'M', 'X', '1', 0, 0, 0, 0};

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path &path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Waveform parse_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE"))
    throw Error("malformed WAV header: missing RIFF/WAVE tags");

  bool have_fmt = false;
  int sample_rate = 0;
  std::size_t off = 12;
  while (off + 8 <= b.size()) {
    std::uint32_t chunk_size = get_u32(b, off + 4);
    std::size_t body = off + 8;
    if (body + chunk_size > b.size())
      throw Error("malformed WAV header: chunk overruns file");
    if (tag_is(b, off, "fmt ")) {
      if (chunk_size < 16) throw Error("malformed WAV header: short fmt chunk");
      std::uint16_t format = get_u16(b, body);
      std::uint16_t channels = get_u16(b, body + 2);
      sample_rate = static_cast<int>(get_u32(b, body + 4));
      std::uint16_t bits = get_u16(b, body + 14);
      if (format != 1)
        throw Error("unsupported WAV format tag " + std::to_string(format) +
                    " (PCM only)");
      if (channels != 1)
        throw Error("unsupported WAV channel count " +
                    std::to_string(channels) + " (mono only)");
      if (bits != 16)
        throw Error("unsupported WAV bit depth " + std::to_string(bits) +
                    " (16-bit only)");
      if (sample_rate <= 0) throw Error("malformed WAV header: sample rate");
      have_fmt = true;
    } else if (tag_is(b, off, "data")) {
      if (!have_fmt) throw Error("malformed WAV header: data before fmt");
      Waveform w;
      w.sample_rate = sample_rate;
      w.samples.resize(chunk_size / 2);
      for (Index i = 0; i < w.samples.size(); ++i) {
        auto v = static_cast<std::int16_t>(get_u16(b, body + 2 * i));
        w.samples[i] = v / 32768.0;
      }
      return w;
    }
    off = body + chunk_size + (chunk_size & 1);
  }
  throw Error("malformed WAV header: no data chunk");
}

std::vector<std::uint8_t> encode_wav(const Waveform &w) {
  if (w.sample_rate <= 0) throw Error("sample rate must be positive");
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 * n);
  put_tag(out, "RIFF");
  put_u32(out, 36 + 2 * n);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, 2 * n);
  for (Index i = 0; i < w.samples.size(); ++i) {
    double s = w.samples[i];
    if (!std::isfinite(s)) throw Error("non-finite sample in waveform");
    double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

Waveform read_wav(const std::filesystem::path &path) {
  auto bytes = read_file_bytes(path);
  try {
    return parse_wav(bytes);
  } catch (const Error &e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_wav(const std::filesystem::path &path, const Waveform &wav) {
  write_file_bytes(path, encode_wav(wav));
}

std::vector<std::uint8_t> encode_fmx(const Matrix &m) {
  std::vector<std::uint8_t> out(std::begin(kFmxMagic), std::end(kFmxMagic));
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  out.push_back(0);
  out.insert(out.end(), 3, 0);
  out.reserve(out.size() + 4 * m.size());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      auto f = static_cast<float>(m(r, c));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(out, bits);
    }
  }
  return out;
}

Matrix parse_fmx(std::span<const std::uint8_t> b) {
  if (b.size() < kFmxHeaderSize || std::memcmp(b.data(), kFmxMagic, 8) != 0)
    throw Error("not an FMX1 file (bad magic)");
  std::uint32_t rows = get_u32(b, 8);
  std::uint32_t cols = get_u32(b, 12);
  if (b[16] != 0)
    throw Error("unsupported FMX1 dtype tag " + std::to_string(b[16]));
  std::size_t expected = kFmxHeaderSize + 4ull * rows * cols;
  if (b.size() != expected)
    throw Error("FMX1 payload size mismatch: expected " +
                std::to_string(expected) + " bytes, got " +
                std::to_string(b.size()));
  Matrix m(rows, cols);
  std::size_t off = kFmxHeaderSize;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c, off += 4) {
      std::uint32_t bits = get_u32(b, off);
      float f;
      std::memcpy(&f, &bits, 4);
      m(r, c) = f;
    }
  }
  return m;
}

void write_fmx(const std::filesystem::path &path, const Matrix &m) {
  write_file_bytes(path, encode_fmx(m));
}

Matrix read_fmx(const std::filesystem::path &path) {
  auto bytes = read_file_bytes(path);
  try {
    return parse_fmx(bytes);
  } catch (const Error &e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace sforge
