// tests/test_lpc.cpp

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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "speechforge/lpc.hpp"
#include "speechforge/mel.hpp"
#include "support.hpp"

using namespace sforge;
using sforge::testing::Gen;

namespace {

const FrameParams kParams = FrameParams::synthesis_default(16000);

Vector on_grid_signal(Gen &g, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = static_cast<double>(g.integer(-32768, 32767)) / 32768.0;
  return v;
}

std::vector<Vector> stable_coeff_frames(Gen &g, Index frames, Index order) {
  std::vector<Vector> out;
  for (Index f = 0; f < frames; ++f) {
    Vector r = testing::random_autocorrelation(g, order);
    out.push_back(levinson_durbin(r, order).coeffs);
  }
  return out;
}

}  // namespace

TEST_CASE("levinson-durbin worked examples") {
  Vector r(3);
  r << 1, 0, 0;
  auto s = levinson_durbin(r, 2);
  CHECK(s.coeffs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.pred_error == 1.0);
  r << 1, 0.5, 0.25;
  s = levinson_durbin(r, 2);
  CHECK(s.coeffs[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(s.coeffs[1]) < 1e-15);
  CHECK(s.pred_error == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("levinson-durbin errors") {
  Vector r(2);
  r << 0, 0.1;
  CHECK_THROWS_AS(levinson_durbin(r, 1), Error);
  r << 1, 1;
  CHECK_THROWS_AS(levinson_durbin(r, 1), Error);
  r << 1, 0.2;
  CHECK_THROWS_AS(levinson_durbin(r, 3), Error);
}

TEST_CASE("levinson-durbin agrees with a dense solve") {
  Gen g(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Index order = g.integer(1, 16);
    const Vector r = testing::random_autocorrelation(g, order);
    const auto s = levinson_durbin(r, order);
    const Vector dense = testing::dense_toeplitz_solve(r, order);
    CHECK((s.coeffs - dense).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(s.pred_error >= 0.0);
    CHECK(s.pred_error == doctest::Approx(r[0] - r.segment(1, order).dot(dense)).epsilon(1e-8));
  }
}

TEST_CASE("levinson-durbin in single precision") {
  Vec<float> r(3);
  r << 1.0f, 0.5f, 0.25f;
  const auto s = levinson_durbin(r, 2);
  CHECK(s.coeffs[0] == doctest::Approx(0.5f));
  CHECK(s.pred_error == doctest::Approx(0.75f));
}

TEST_CASE("spectral flatness") {
  Vector v(4);
  v << 1, 1, 1, 1;
  CHECK(spectral_flatness(v) == doctest::Approx(1.0).epsilon(1e-12));
  v << 1, 1e-12, 1e-12, 1e-12;
  CHECK(spectral_flatness(v) < 0.01);
  v << 1, 2, 4, 8;
  CHECK(std::abs(spectral_flatness(v) - 0.75425) < 1e-5);
  CHECK_THROWS_AS(spectral_flatness(Vector::Zero(4)), Error);
  Gen g(42);
  for (int i = 0; i < 50; ++i) {
    const double f = spectral_flatness(g.noise(g.integer(1, 64)).cwiseAbs());
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("flat mel frame gives a trivial predictor") {
  const MelFilterbank fb = mel_filterbank(80, kParams, 16000, 0.0, 8000.0);
  const Vector mel = (fb.weights * Vector::Ones(fb.num_bins())).array().log().matrix();
  const LpcFrame f = mel_to_lpc(mel, fb);
  REQUIRE(f.coeffs.size() == 16);
  CHECK(f.coeffs.cwiseAbs().maxCoeff() < 1e-3);
  CHECK(f.flatness > 0.99);
  CHECK(f.pred_error > 0.0);
}

TEST_CASE("mel frame of an AR(2) spectrum recovers its coefficients") {
  const MelFilterbank fb = mel_filterbank(80, kParams, 16000, 0.0, 8000.0);
  for (const auto &[a1, a2] : {std::pair{0.9, -0.4}, {1.2, -0.6}, {-0.5, 0.2}}) {
    Vector mag(fb.num_bins());
    for (Index k = 0; k < mag.size(); ++k) {
      const double w = std::numbers::pi * k / (mag.size() - 1);
      const std::complex<double> den =
          1.0 - a1 * std::polar(1.0, -w) - a2 * std::polar(1.0, -2.0 * w);
      mag[k] = 1.0 / std::abs(den);
    }
    const Vector mel = (fb.weights * mag).array().log().matrix();
    LpcOptions opts;
    opts.order = 2;
    const LpcFrame f = mel_to_lpc(mel, fb, opts);
    CHECK(f.coeffs[0] == doctest::Approx(a1).epsilon(0.10));
    CHECK(f.coeffs[1] == doctest::Approx(a2).epsilon(0.10));
  }
}

TEST_CASE("silent mel frame") {
  const MelFilterbank fb = mel_filterbank(80, kParams, 16000, 0.0, 8000.0);
  const LpcFrame f = mel_to_lpc(Vector::Constant(80, std::log(kDefaultLogFloor)), fb);
  CHECK(f.coeffs.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(mel_to_lpc(Vector::Zero(79), fb), Error);
}

TEST_CASE("mu-law fixed points and range") {
  CHECK(mu_law_encode(0.0) == 128);
  CHECK(mu_law_decode(128) == 0.0);
  CHECK(mu_law_encode(1.0) == 255);
  CHECK(mu_law_encode(-1.0) == 0);
  CHECK(mu_law_encode(3.0) == 255);
  CHECK(mu_law_encode(-3.0) == 0);
  CHECK(mu_law_decode(255) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu_law_decode(0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("mu-law error stays within the local step") {
  const auto levels = testing::mu_law_levels();
  for (int c = 0; c < 256; ++c)
    CHECK(mu_law_decode(static_cast<std::uint8_t>(c)) == doctest::Approx(levels[c]).epsilon(1e-12));
  Gen g(43);
  for (int i = 0; i < 10000; ++i) {
    const double x = g.uniform(-1.0, 1.0);
    const double err = std::abs(mu_law_decode(mu_law_encode(x)) - x);
    CHECK(err <= testing::mu_law_local_step(levels, x));
  }
  for (int pcm = -32768; pcm <= 32767; ++pcm) {
    const double x = pcm / 32768.0;
    CHECK(std::abs(mu_law_decode(mu_law_encode(x)) - x) <= testing::mu_law_local_step(levels, x));
  }
  int prev = -1;
  for (int i = -1000; i <= 1000; ++i) {
    const int c = mu_law_encode(i / 1000.0);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("lpc analysis and synthesis worked examples") {
  Vector s(3), e(3);
  s << 1, 1, 1;
  std::vector<Vector> a{Vector::Constant(1, 0.5)};
  const Vector ex = lpc_analysis(s, a, 3);
  CHECK(ex[0] == 1.0);
  CHECK(ex[1] == 0.5);
  CHECK(ex[2] == 0.5);
  e << 1, 0, 0;
  const Vector syn = lpc_synthesis(e, a, 3);
  CHECK(syn[0] == 1.0);
  CHECK(syn[1] == 0.5);
  CHECK(syn[2] == 0.25);

  std::vector<Vector> zero{Vector::Zero(4), Vector::Zero(4)};
  Gen g(44);
  const Vector x = on_grid_signal(g, 20);
  CHECK(lpc_analysis(x, zero, 10) == x);
  CHECK(lpc_synthesis(Vector::Zero(20), zero, 10).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(lpc_analysis(x, zero, 9), Error);
}

TEST_CASE("lpc analysis and synthesis are exact inverses") {
  Gen g(45);
  for (int trial = 0; trial < 20; ++trial) {
    const Index order = g.integer(1, 16), frame = g.integer(10, 200), frames = g.integer(1, 12);
    const auto coeffs = stable_coeff_frames(g, frames, order);
    const Vector s = on_grid_signal(g, frame * frames - g.integer(0, frame - 1));
    CHECK(lpc_synthesis(lpc_analysis(s, coeffs, frame), coeffs, frame) == s);
    const Vector e = on_grid_signal(g, s.size()) / 64.0;
    CHECK(lpc_analysis(lpc_synthesis(e, coeffs, frame), coeffs, frame) == e);
  }
}

TEST_CASE("training sequences") {
  const MelFilterbank fb = mel_filterbank(80, kParams, 16000, 0.0, 8000.0);
  Gen g(46);
  Waveform w;
  w.samples = on_grid_signal(g, 4000) * 0.3;
  const MelSpectrogram mel = mel_spectrogram(w, kParams, fb);
  const auto seqs = chunk_training_sequences(w, mel, fb);
  REQUIRE(seqs.size() == 2);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    CHECK(seqs[i].samples == w.samples.segment(static_cast<Index>(1600 * i), 1600));
    CHECK(seqs[i].excitation.size() == 1600);
    CHECK(seqs[i].lpc.size() == 8);
    CHECK(seqs[i].features == mel.values.middleRows(static_cast<Index>(8 * i), 8));
    for (const auto &f : seqs[i].lpc) {
      CHECK(f.flatness >= 0.0);
      CHECK(f.flatness <= 1.0);
      CHECK(f.pred_error >= 0.0);
    }
  }

  Waveform one;
  one.samples = w.samples.head(1600);
  CHECK(chunk_training_sequences(one, mel_spectrogram(one, kParams, fb), fb).size() == 1);
  Waveform short_wav;
  short_wav.samples = w.samples.head(1599);
  CHECK(chunk_training_sequences(short_wav, mel_spectrogram(short_wav, kParams, fb), fb).empty());
  CHECK_THROWS_AS(chunk_training_sequences(w, mel, fb, LpcOptions{}, 1500), Error);
}
