// speechforge/augment.hpp

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
#include <random>
#include <vector>

#include "speechforge/features.hpp"

namespace sforge {

/// Playback-speed change by resampling: the output keeps the input sample
/// rate, has round(len/factor) samples, and every frequency is scaled by
/// `factor` (tempo and pitch change together).
Waveform speed_perturb(const Waveform &w, double factor);

enum class MaskFill { kMean, kZero };

struct SpecAugmentConfig {
  int n_freq_masks = 2;
  Index max_freq_width = 30;
  int n_time_masks = 2;
  Index max_time_width = 40;
  MaskFill fill = MaskFill::kMean;
  std::uint64_t seed = 0;
};

struct MaskSpan {
  Index start = 0;
  Index width = 0;
  bool operator==(const MaskSpan &) const = default;
};

struct SpecAugmentMasks {
  std::vector<MaskSpan> freq;  // column spans
  std::vector<MaskSpan> time;  // row spans
};

/// Uniform integer in [lo, hi] from one engine draw: lo + draw % (hi-lo+1).
/// Pinned so that mask sequences are reproducible across standard libraries.
Index uniform_draw(std::mt19937_64 &rng, Index lo, Index hi);

/// Draw order, all from std::mt19937_64(seed): for each frequency mask the
/// width in [0, min(F, dim)] then the start in [0, dim - width]; then the
/// same for each time mask over frames. Widths larger than the matrix are
/// clamped to its extent.
SpecAugmentMasks draw_spec_augment_masks(Index frames, Index dim,
                                         const SpecAugmentConfig &cfg);

/// Masks whole frequency columns and time rows. Masked cells take the mean
/// of the input matrix (or zero); all other cells are copied unchanged.
FeatureMatrix spec_augment(const FeatureMatrix &f, const SpecAugmentConfig &cfg,
                           SpecAugmentMasks *applied = nullptr);

}  // namespace sforge
