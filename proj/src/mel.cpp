// src/mel.cpp

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

#include "speechforge/mel.hpp"

#include <algorithm>
#include <cmath>

namespace sforge {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::pair<Index, Index> MelFilterbank::support(Index row) const {
  Index lo = -1, hi = -1;
  for (Index k = 0; k < weights.cols(); ++k) {
    if (weights(row, k) > 0.0) {
      if (lo < 0) lo = k;
      hi = k;
    }
  }
  return {lo, hi};
}

MelFilterbank mel_filterbank(Index n_mels, const FrameParams &p,
                             int sample_rate, double fmin, double fmax) {
  p.validate();
  if (n_mels < 1) throw Error("mel_filterbank: n_mels must be >= 1");
  if (sample_rate <= 0) throw Error("mel_filterbank: bad sample rate");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0))
    throw Error("mel_filterbank: need 0 <= fmin < fmax <= sample_rate/2");

  MelFilterbank fb;
  fb.fmin = fmin;
  fb.fmax = fmax;
  fb.sample_rate = sample_rate;
  fb.fft_size = p.fft_size;

  const Index bins = p.num_bins();
  const double mel_lo = hz_to_mel(fmin), mel_hi = hz_to_mel(fmax);
  Vector edges(n_mels + 2);
  for (Index i = 0; i < n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

  fb.weights = Matrix::Zero(n_mels, bins);
  const double bin_hz = static_cast<double>(sample_rate) / p.fft_size;
  for (Index m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (Index k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      fb.weights(m, k) = std::max(0.0, std::min(up, down));
    }
    if (fb.weights.row(m).maxCoeff() <= 0.0)
      throw Error("mel_filterbank: band " + std::to_string(m) + " of " +
                  std::to_string(n_mels) +
                  " covers no FFT bin; too many bands for fft_size " +
                  std::to_string(p.fft_size));
  }
  return fb;
}

void check_filterbank(const MelFilterbank &fb, const FrameParams &p,
                      int sample_rate) {
  if (fb.sample_rate != sample_rate)
    throw Error("mel filterbank built for " + std::to_string(fb.sample_rate) +
                " Hz, input is " + std::to_string(sample_rate) + " Hz");
  if (fb.fft_size != p.fft_size || fb.num_bins() != p.num_bins())
    throw Error("mel filterbank fft_size does not match frame params");
}

Matrix apply_mel(const Matrix &magnitudes, const MelFilterbank &fb,
                 double log_floor) {
  if (magnitudes.cols() != fb.num_bins())
    throw Error("apply_mel: magnitude has " +
                std::to_string(magnitudes.cols()) + " bins, filterbank " +
                std::to_string(fb.num_bins()));
  Matrix out = magnitudes * fb.weights.transpose();
  return out.cwiseMax(log_floor).array().log().matrix();
}

MelSpectrogram mel_spectrogram(const Waveform &w, const FrameParams &p,
                               const MelFilterbank &fb, double log_floor) {
  check_filterbank(fb, p, w.sample_rate);
  if (!(log_floor > 0.0)) throw Error("mel_spectrogram: log_floor must be > 0");
  MelSpectrogram out;
  out.params = p;
  out.sample_rate = w.sample_rate;
  out.log_floor = log_floor;
  out.values = apply_mel(magnitude(stft(w, p)), fb, log_floor);
  return out;
}

}  // namespace sforge
