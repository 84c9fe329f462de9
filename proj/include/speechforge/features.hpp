// speechforge/features.hpp

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

#include <optional>

#include "speechforge/mel.hpp"

namespace sforge {

enum class FeatureKind { kFbankPitch, kMel, kGeneric };

struct FeatureMatrix {
  Matrix values;  // frames x dim
  FeatureKind kind = FeatureKind::kGeneric;
  double frame_rate = 80.0;  // frames per second
  bool cmvn_applied = false;

  Index num_frames() const { return values.rows(); }
  Index dim() const { return values.cols(); }
};

/// Pitch block: voicing (NCCF peak), f0 in Hz (0 when unvoiced), delta f0.
struct PitchConfig {
  double min_f0 = 60.0;
  double max_f0 = 400.0;
  double nccf_threshold = 0.5;
  int median_width = 5;

  void validate(int sample_rate, const FrameParams &p) const;
};

inline constexpr Index kPitchDims = 3;

/// frames x 3 matrix of (voicing, f0, delta f0), frames aligned with stft().
Matrix pitch_features(const Waveform &w, const FrameParams &p,
                      const PitchConfig &pc);

/// Log-Mel columns [0, n_mels) computed by mel_spectrogram(), followed by
/// the three pitch columns.
FeatureMatrix fbank_pitch(const Waveform &w, const FrameParams &p,
                          const MelFilterbank &fb, const PitchConfig &pc,
                          double log_floor = kDefaultLogFloor);

enum class CmvnScope { kPerUtterance, kPrecomputed };

struct CmvnStats {
  Vector mean;
  Vector var;
};

inline constexpr double kCmvnVarianceFloor = 1e-10;

/// Per-column mean/variance normalization. Throws if `f` is already
/// normalized or if precomputed stats have the wrong dimension.
FeatureMatrix cmvn(const FeatureMatrix &f, CmvnScope scope,
                   const std::optional<CmvnStats> &stats = std::nullopt);

/// Population mean and variance of each column.
CmvnStats compute_cmvn_stats(const Matrix &values);

}  // namespace sforge
