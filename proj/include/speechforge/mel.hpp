// speechforge/mel.hpp

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

#include "speechforge/stft.hpp"

namespace sforge {

inline constexpr double kDefaultLogFloor = 1e-10;

/// mel(f) = 2595 * log10(1 + f/700)
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters (peak 1, no area normalization) with centers equally
/// spaced on the mel scale between fmin and fmax.
struct MelFilterbank {
  Matrix weights;  // n_mels x bins, nonnegative
  double fmin = 0.0;
  double fmax = 8000.0;
  int sample_rate = 16000;
  Index fft_size = 1024;

  Index num_mels() const { return weights.rows(); }
  Index num_bins() const { return weights.cols(); }

  /// First and last bin (inclusive) with nonzero weight in a row.
  std::pair<Index, Index> support(Index row) const;
};

/// Throws Error if the bounds are invalid or some band ends up with no
/// nonzero bin (band count exceeds the usable resolution).
MelFilterbank mel_filterbank(Index n_mels, const FrameParams &p,
                             int sample_rate, double fmin, double fmax);

struct MelSpectrogram {
  Matrix values;  // frames x n_mels, natural-log magnitude
  FrameParams params;
  int sample_rate = 16000;
  double log_floor = kDefaultLogFloor;

  Index num_frames() const { return values.rows(); }
  Index num_mels() const { return values.cols(); }
};

/// log(max(fb * |X|, log_floor)) applied to each row of a magnitude matrix.
Matrix apply_mel(const Matrix &magnitudes, const MelFilterbank &fb,
                 double log_floor = kDefaultLogFloor);

MelSpectrogram mel_spectrogram(const Waveform &w, const FrameParams &p,
                               const MelFilterbank &fb,
                               double log_floor = kDefaultLogFloor);

/// Throws Error unless `fb` was built for this geometry and rate.
void check_filterbank(const MelFilterbank &fb, const FrameParams &p,
                      int sample_rate);

}  // namespace sforge
