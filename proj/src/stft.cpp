// src/stft.cpp

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

#include "speechforge/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <vector>

namespace sforge {

Index reflect_index(Index i, Index n) {
  if (n == 1) return 0;
  const Index period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

void FrameParams::validate() const {
  if (hop_len <= 0) throw Error("frame params: hop_len must be positive");
  if (hop_len > window_len)
    throw Error("frame params: hop_len " + std::to_string(hop_len) +
                " exceeds window_len " + std::to_string(window_len));
  if (window_len > fft_size)
    throw Error("frame params: window_len exceeds fft_size");
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
    throw Error("frame params: fft_size must be a power of two");
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

FrameParams FrameParams::from_durations(int sample_rate, double window_s,
                                        double hop_s) {
  FrameParams p;
  p.window_len = static_cast<Index>(std::lround(window_s * sample_rate));
  p.hop_len = static_cast<Index>(std::lround(hop_s * sample_rate));
  p.fft_size = next_pow2(p.window_len);
  p.validate();
  return p;
}

Vector make_window(WindowKind kind, Index n) {
  Vector w(n);
  const double a = kind == WindowKind::kHann ? 0.5 : 0.54;
  for (Index i = 0; i < n; ++i)
    w[i] = a - (1.0 - a) * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

Vector padded_window(const FrameParams &p) {
  Vector w = Vector::Zero(p.fft_size);
  w.segment((p.fft_size - p.window_len) / 2, p.window_len) =
      make_window(p.window_kind, p.window_len);
  return w;
}

Index num_frames(Index num_samples, const FrameParams &p) {
  if (p.centered) return num_samples / p.hop_len + 1;
  if (num_samples < p.fft_size) return 0;
  return (num_samples - p.fft_size) / p.hop_len + 1;
}

Index istft_length(Index frames, const FrameParams &p) {
  if (frames <= 0) return 0;
  return (frames - 1) * p.hop_len + (p.centered ? 0 : p.fft_size);
}

void check_overlap_add(const FrameParams &p) {
  p.validate();
  Vector w = padded_window(p);
  Vector acc = Vector::Zero(p.hop_len);
  for (Index i = 0; i < p.fft_size; ++i) acc[i % p.hop_len] += w[i] * w[i];
  if (acc.minCoeff() <= 1e-10 * acc.maxCoeff())
    throw Error("window/hop pair violates the overlap-add condition (hop " +
                std::to_string(p.hop_len) + ", window " +
                std::to_string(p.window_len) + ")");
}

ComplexSpectrogram stft(const Waveform &w, const FrameParams &p) {
  p.validate();
  const Index n = w.size();
  if (n == 0) throw Error("stft: empty waveform");
  if (!w.samples.allFinite()) throw Error("stft: non-finite samples");
  const Index frames = num_frames(n, p);
  if (frames <= 0)
    throw Error("stft: waveform shorter than one uncentered frame");

  const Vector win = padded_window(p);
  const Index pad = p.centered ? p.fft_size / 2 : 0;
  const Index bins = p.num_bins();

  ComplexSpectrogram out;
  out.params = p;
  out.sample_rate = w.sample_rate;
  out.values.resize(frames, bins);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(p.fft_size);
  std::vector<std::complex<double>> spec;
  for (Index t = 0; t < frames; ++t) {
    const Index start = t * p.hop_len - pad;
    for (Index i = 0; i < p.fft_size; ++i)
      frame[i] = w.samples[reflect_index(start + i, n)] * win[i];
    fft.fwd(spec, frame);
    for (Index k = 0; k < bins; ++k) out.values(t, k) = spec[k];
  }
  return out;
}

Waveform istft(const ComplexSpectrogram &s) {
  const FrameParams &p = s.params;
  check_overlap_add(p);
  if (s.num_bins() != p.num_bins())
    throw Error("istft: spectrogram has " + std::to_string(s.num_bins()) +
                " bins, params imply " + std::to_string(p.num_bins()));
  Waveform out;
  out.sample_rate = s.sample_rate;
  const Index frames = s.num_frames();
  if (frames == 0) return out;

  const Vector win = padded_window(p);
  const Index full = (frames - 1) * p.hop_len + p.fft_size;
  Vector acc = Vector::Zero(full);
  Vector norm = Vector::Zero(full);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec(p.num_bins());
  std::vector<double> frame;
  for (Index t = 0; t < frames; ++t) {
    for (Index k = 0; k < p.num_bins(); ++k) spec[k] = s.values(t, k);
    fft.inv(frame, spec, p.fft_size);
    const Index start = t * p.hop_len;
    for (Index i = 0; i < p.fft_size; ++i) {
      acc[start + i] += frame[i] * win[i];
      norm[start + i] += win[i] * win[i];
    }
  }
  for (Index i = 0; i < full; ++i)
    acc[i] = norm[i] > 1e-12 ? acc[i] / norm[i] : 0.0;

  if (p.centered)
    out.samples = acc.segment(p.fft_size / 2, (frames - 1) * p.hop_len);
  else
    out.samples = std::move(acc);
  return out;
}

Matrix magnitude(const ComplexSpectrogram &s) { return s.values.cwiseAbs(); }

}  // namespace sforge
