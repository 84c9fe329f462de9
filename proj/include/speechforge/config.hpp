// speechforge/config.hpp

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

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "speechforge/augment.hpp"
#include "speechforge/ctc.hpp"
#include "speechforge/features.hpp"
#include "speechforge/griffin_lim.hpp"
#include "speechforge/lpc.hpp"
#include "speechforge/ngram.hpp"
#include "speechforge/stft.hpp"

namespace sforge {

/// Toolkit-wide defaults. The INI form has one section per module:
///
///   [audio]    sample_rate
///   [frontend] window_ms hop_ms fft_size window n_mels fmin fmax log_floor
///   [pitch]    min_f0 max_f0 nccf_threshold median_width
///   [augment]  speed_factors freq_masks max_freq_width time_masks
///              max_time_width fill seed
///   [filter]   min_duration max_duration subsampling
///   [glim]     iterations init seed nnls_iterations
///   [lpc]      order lag_window_hz white_noise_correction
///   [bpe]      vocab_size
///   [lm]       order smoothing k
///   [decode]   beam ctc_weight lm_weight nbest
///
/// Unknown sections or keys are rejected.
struct PipelineConfig {
  int sample_rate = 16000;
  FrameParams frame = FrameParams::synthesis_default(16000);
  Index n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = kDefaultLogFloor;
  PitchConfig pitch;

  std::vector<double> speed_factors{0.9, 1.1};
  SpecAugmentConfig specaug;

  double min_duration = 0.5;
  double max_duration = 30.0;
  int subsampling = 4;

  GriffinLimConfig glim;
  int nnls_iterations = kDefaultNnlsIterations;
  LpcOptions lpc;

  int bpe_vocab = 5000;
  NGramTrainOptions lm;
  FusionWeights decode;
  std::size_t nbest = 5;

  void validate() const;
};

PipelineConfig parse_config(std::istream &in);
PipelineConfig load_config(const std::filesystem::path &path);

/// Writes every key with its current value, in the layout parse_config reads.
std::string dump_config(const PipelineConfig &c);

}  // namespace sforge
