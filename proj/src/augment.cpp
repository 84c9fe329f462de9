// src/augment.cpp

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

#include "speechforge/augment.hpp"

#include <algorithm>
#include <cmath>

#include "speechforge/resample.hpp"

namespace sforge {

Waveform speed_perturb(const Waveform &w, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw Error("speed_perturb: factor must be positive, got " +
                std::to_string(factor));
  const auto out_len = static_cast<Index>(std::llround(w.size() / factor));
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples =
      sinc_interpolate(w.samples, factor, out_len, std::min(1.0, 1.0 / factor));
  return out;
}

Index uniform_draw(std::mt19937_64 &rng, Index lo, Index hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<Index>(rng() % span);
}

SpecAugmentMasks draw_spec_augment_masks(Index frames, Index dim,
                                         const SpecAugmentConfig &cfg) {
  if (cfg.n_freq_masks < 0 || cfg.n_time_masks < 0 || cfg.max_freq_width < 0 ||
      cfg.max_time_width < 0)
    throw Error("spec_augment: mask counts and widths must be >= 0");
  std::mt19937_64 rng(cfg.seed);
  SpecAugmentMasks masks;
  const Index fw = std::min(cfg.max_freq_width, dim);
  for (int i = 0; i < cfg.n_freq_masks; ++i) {
    MaskSpan s;
    s.width = uniform_draw(rng, 0, fw);
    s.start = uniform_draw(rng, 0, dim - s.width);
    masks.freq.push_back(s);
  }
  const Index tw = std::min(cfg.max_time_width, frames);
  for (int i = 0; i < cfg.n_time_masks; ++i) {
    MaskSpan s;
    s.width = uniform_draw(rng, 0, tw);
    s.start = uniform_draw(rng, 0, frames - s.width);
    masks.time.push_back(s);
  }
  return masks;
}

FeatureMatrix spec_augment(const FeatureMatrix &f, const SpecAugmentConfig &cfg,
                           SpecAugmentMasks *applied) {
  SpecAugmentMasks masks = draw_spec_augment_masks(f.num_frames(), f.dim(), cfg);
  const double fill =
      cfg.fill == MaskFill::kMean && f.values.size() > 0 ? f.values.mean() : 0.0;
  FeatureMatrix out = f;
  for (const MaskSpan &s : masks.freq)
    out.values.middleCols(s.start, s.width).setConstant(fill);
  for (const MaskSpan &s : masks.time)
    out.values.middleRows(s.start, s.width).setConstant(fill);
  if (applied) *applied = std::move(masks);
  return out;
}

}  // namespace sforge
