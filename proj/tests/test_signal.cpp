// tests/test_signal.cpp

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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "speechforge/io.hpp"
#include "speechforge/mel.hpp"
#include "speechforge/resample.hpp"
#include "speechforge/stft.hpp"
#include "support.hpp"

using namespace sforge;
using sforge::testing::Gen;

namespace {

Waveform from_pcm(const std::vector<std::int16_t> &codes) {
  Waveform w;
  w.samples.resize(static_cast<Index>(codes.size()));
  for (std::size_t i = 0; i < codes.size(); ++i) w.samples[static_cast<Index>(i)] = codes[i] / 32768.0;
  return w;
}

double snr_db(const Vector &ref, const Vector &est) {
  return 10.0 * std::log10(ref.squaredNorm() / (ref - est).squaredNorm());
}

}  // namespace

TEST_CASE("wav scaling and round trip") {
  const Waveform w = from_pcm({0, 32767, -32768, 1, -1, 12345});
  CHECK(w.samples[1] == doctest::Approx(0.99997).epsilon(1e-5));
  const auto bytes = encode_wav(w);
  const Waveform back = parse_wav(bytes);
  CHECK(back.sample_rate == 16000);
  CHECK((back.samples - w.samples).cwiseAbs().maxCoeff() == 0.0);
  CHECK(encode_wav(back) == bytes);
}

TEST_CASE("wav file round trip is byte identical") {
  Gen g(7);
  std::vector<std::int16_t> codes(1600);
  for (auto &c : codes) c = static_cast<std::int16_t>(g.integer(-32768, 32767));
  const auto path = std::filesystem::temp_directory_path() / "sf_test_roundtrip.wav";
  write_wav(path, from_pcm(codes));
  const auto first = read_file_bytes(path);
  write_wav(path, read_wav(path));
  CHECK(read_file_bytes(path) == first);
  std::filesystem::remove(path);
}

TEST_CASE("wav rejects unsupported formats") {
  auto bytes = encode_wav(from_pcm({1, 2, 3, 4}));
  auto stereo = bytes;
  stereo[22] = 2;  // channel count
  CHECK_THROWS_AS(parse_wav(stereo), Error);
  auto eight_bit = bytes;
  eight_bit[34] = 8;
  CHECK_THROWS_AS(parse_wav(eight_bit), Error);
  std::vector<std::uint8_t> junk(10, 0);
  CHECK_THROWS_AS(parse_wav(junk), Error);
}

TEST_CASE("fmx layout") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  const auto bytes = encode_fmx(m);
  REQUIRE(bytes.size() == kFmxHeaderSize + 6 * 4);
  CHECK(std::memcmp(bytes.data(), "FMX1\0\0\0\0", 8) == 0);
  CHECK(bytes[8] == 2);
  CHECK(bytes[12] == 3);
  CHECK(bytes[16] == 0);
  float third;
  std::memcpy(&third, bytes.data() + kFmxHeaderSize + 2 * 4, 4);
  CHECK(third == 3.0f);
  CHECK(parse_fmx(bytes) == m);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(parse_fmx(truncated), Error);
}

TEST_CASE("frame geometry") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  CHECK(p.window_len == 800);
  CHECK(p.hop_len == 200);
  CHECK(p.fft_size == 1024);
  Waveform w;
  w.samples = Vector::Zero(16000);
  const auto s = stft(w, p);
  CHECK(s.num_frames() == 81);
  CHECK(s.num_bins() == 513);
  CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);

  FrameParams bad = p;
  bad.hop_len = 900;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.fft_size = 1000;
  CHECK_THROWS_AS(bad.validate(), Error);
  Waveform empty;
  CHECK_THROWS_AS(stft(empty, p), Error);
}

TEST_CASE("tone lands on its bin") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  const auto mag = magnitude(stft(testing::tone(1000.0, 1.0), p));
  // Edge frames see the reflected padding.
  for (Index t = 1; t + 1 < mag.rows(); ++t) {
    Index arg;
    mag.row(t).maxCoeff(&arg);
    CHECK(arg == 64);
  }
}

TEST_CASE("istft inverts stft") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  Gen g(11);
  Waveform w;
  w.samples = g.noise(16000, 0.5);
  const Waveform back = istft(stft(w, p));
  REQUIRE(back.size() == 16000);
  CHECK(snr_db(w.samples, back.samples) > 60.0);
  const Index lo = p.fft_size, n = w.size() - 2 * p.fft_size;
  const double rel = (w.samples.segment(lo, n) - back.samples.segment(lo, n)).norm() /
                     w.samples.segment(lo, n).norm();
  CHECK(rel < 1e-6);

  ComplexSpectrogram zero = stft(w, p);
  zero.values.setZero();
  CHECK(istft(zero).samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("istft round trip holds for other valid geometries") {
  Gen g(12);
  for (const auto &[win, hop] : {std::pair<Index, Index>{400, 100}, {512, 128}, {320, 160}}) {
    FrameParams p;
    p.window_len = win;
    p.hop_len = hop;
    p.fft_size = next_pow2(win);
    for (bool centered : {true, false}) {
      p.centered = centered;
      Waveform w;
      w.samples = g.noise(4000 + g.integer(0, 999));
      const Waveform back = istft(stft(w, p));
      const Index n = std::min(back.size(), w.size()) - 2 * p.fft_size;
      const Index lo = p.fft_size;
      const double rel = (w.samples.segment(lo, n) - back.samples.segment(lo, n)).norm() /
                         w.samples.segment(lo, n).norm();
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("overlap-add violation is reported") {
  FrameParams p;
  p.window_len = 400;
  p.hop_len = 400;
  p.fft_size = 512;
  CHECK_THROWS_AS(check_overlap_add(p), Error);
}

TEST_CASE("spectrogram energy matches waveform energy up to the window constant") {
  FrameParams p = FrameParams::synthesis_default(16000);
  p.centered = false;
  // Sum over one hop period of the squared window, constant for Hann at 1/4 hop.
  const Vector win = make_window(p.window_kind, p.window_len);
  double overlap = 0.0;
  for (Index j = 0; j < p.window_len; j += p.hop_len) overlap += win[j + 37] * win[j + 37];

  Gen g(5);
  Waveform w;
  w.samples = Vector::Zero(12000);
  w.samples.segment(2048, 12000 - 4096) = g.noise(12000 - 4096);
  const auto s = stft(w, p);
  const Index half = p.fft_size / 2;
  double spec = 0.0;
  for (Index t = 0; t < s.num_frames(); ++t) {
    spec += std::norm(s.values(t, 0)) + std::norm(s.values(t, half));
    for (Index k = 1; k < half; ++k) spec += 2.0 * std::norm(s.values(t, k));
  }
  spec /= static_cast<double>(p.fft_size);
  CHECK(spec / (overlap * w.samples.squaredNorm()) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mel scale") {
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK(hz_to_mel(700.0) == doctest::Approx(781.17).epsilon(1e-5));
  CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
}

TEST_CASE("filterbank shape and support") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  const MelFilterbank fb = mel_filterbank(80, p, 16000, 0.0, 8000.0);
  REQUIRE(fb.weights.rows() == 80);
  REQUIRE(fb.weights.cols() == 513);
  CHECK(fb.weights.minCoeff() >= 0.0);
  Index prev_lo = -1, prev_hi = -1;
  for (Index m = 0; m < 80; ++m) {
    const auto [lo, hi] = fb.support(m);
    REQUIRE(lo <= hi);
    for (Index k = lo; k <= hi; ++k) CHECK(fb.weights(m, k) > 0.0);
    CHECK(fb.weights.row(m).sum() ==
          doctest::Approx(fb.weights.row(m).segment(lo, hi - lo + 1).sum()));
    CHECK(lo >= prev_lo);
    CHECK(hi >= prev_hi);
    prev_lo = lo, prev_hi = hi;
  }
  const Vector column = fb.weights.colwise().sum();
  const double bin_hz = 16000.0 / 1024.0;
  for (Index k = 0; k < 513; ++k)
    if (k * bin_hz > 0.0 && k * bin_hz < 8000.0) CHECK(column[k] > 0.0);

  CHECK_THROWS_AS(mel_filterbank(400, p, 16000, 0.0, 8000.0), Error);
  CHECK_THROWS_AS(mel_filterbank(80, p, 16000, 100.0, 9000.0), Error);
  CHECK_THROWS_AS(mel_filterbank(0, p, 16000, 0.0, 8000.0), Error);
}

TEST_CASE("mel spectrogram composition") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  const MelFilterbank fb = mel_filterbank(80, p, 16000, 0.0, 8000.0);
  Gen g(3);
  Waveform w;
  w.samples = g.noise(9 * 200);
  const MelSpectrogram mel = mel_spectrogram(w, p, fb);
  REQUIRE(mel.num_frames() == 10);
  const auto spec = stft(w, p);
  for (Index t = 0; t < 10; ++t)
    for (Index m = 0; m < 80; ++m) {
      double acc = 0.0;
      for (Index k = 0; k < 513; ++k) acc += fb.weights(m, k) * std::abs(spec.values(t, k));
      CHECK(mel.values(t, m) == doctest::Approx(std::log(std::max(acc, kDefaultLogFloor))));
    }

  Waveform silence;
  silence.samples = Vector::Zero(16000);
  const MelSpectrogram z = mel_spectrogram(silence, p, fb);
  CHECK(z.values.rows() == 81);
  CHECK(z.values.cols() == 80);
  CHECK((z.values.array() - std::log(kDefaultLogFloor)).abs().maxCoeff() < 1e-12);

  Waveform other_rate = w;
  other_rate.sample_rate = 22050;
  CHECK_THROWS_AS(mel_spectrogram(other_rate, p, fb), Error);
}

TEST_CASE("filterbank application is monotone") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  const MelFilterbank fb = mel_filterbank(80, p, 16000, 0.0, 8000.0);
  Gen g(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = g.matrix(4, 513, 0.0, 1.0);
    const Matrix b = a + g.matrix(4, 513, 0.0, 0.5);
    CHECK((apply_mel(b, fb).array() >= apply_mel(a, fb).array()).all());
  }
}

TEST_CASE("resampling length, identity and tone frequency") {
  const Waveform w = testing::tone(440.0, 1.0);
  const Waveform down = resample(w, 8000);
  CHECK(down.size() == 8000);
  CHECK(down.sample_rate == 8000);
  CHECK(testing::spectral_peak(down.samples, 8000, 300.0, 600.0) == doctest::Approx(440.0).epsilon(0.5 / 440.0));
  const Waveform same = resample(w, 16000);
  CHECK((same.samples - w.samples).cwiseAbs().maxCoeff() < 1e-9);
  const Waveform up = resample(w, 22050);
  CHECK(up.size() == 22050);
  CHECK(testing::spectral_peak(up.samples, 22050, 300.0, 600.0) == doctest::Approx(440.0).epsilon(1e-3));
  CHECK_THROWS_AS(resample(w, 0), Error);
}

TEST_CASE("signal operations are pure") {
  const FrameParams p = FrameParams::synthesis_default(16000);
  const MelFilterbank fb = mel_filterbank(80, p, 16000, 0.0, 8000.0);
  Gen g(23);
  Waveform w;
  w.samples = g.noise(5000);
  CHECK(mel_spectrogram(w, p, fb).values == mel_spectrogram(w, p, fb).values);
  CHECK(stft(w, p).values == stft(w, p).values);
}
