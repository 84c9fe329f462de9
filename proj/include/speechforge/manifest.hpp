// speechforge/manifest.hpp

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
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speechforge/bpe.hpp"
#include "speechforge/stft.hpp"
#include "speechforge/types.hpp"
#include "speechforge/wer.hpp"

namespace sforge {

enum class Origin { kReal, kTts, kPseudo };

Origin parse_origin(std::string_view s);
std::string_view origin_name(Origin o);

struct UtteranceRecord {
  std::string id;
  std::string audio;
  double duration = 0.0;  // seconds
  std::string transcript;
  std::string speaker;
  Origin origin = Origin::kReal;

  bool operator==(const UtteranceRecord &) const = default;
};

using Manifest = std::vector<UtteranceRecord>;

struct ManifestIssue {
  std::size_t line = 0;
  std::string message;
};

/// One JSON object per line with fields id, audio, duration, transcript,
/// speaker, origin. Transcripts are upper-cased on read. With strict set a
/// malformed line throws; otherwise it is skipped and reported in issues.
Manifest parse_manifest(std::istream &in, bool strict = true,
                        std::vector<ManifestIssue> *issues = nullptr);
Manifest read_manifest(const std::filesystem::path &path, bool strict = true,
                       std::vector<ManifestIssue> *issues = nullptr);
void write_manifest(std::ostream &out, const Manifest &m);
void write_manifest(const std::filesystem::path &path, const Manifest &m);
std::string record_to_json(const UtteranceRecord &r);

/// Throws on duplicate ids or non-positive durations.
void validate_manifest(const Manifest &m);

/// Optional CTC length check applied by manifest_filter.
struct FeasibilityCheck {
  const BpeModel *bpe = nullptr;
  FrameParams params;
  int sample_rate = 16000;
  int subsampling = 4;

  /// Encoder frames for a duration: STFT frames divided by the subsampling.
  Index encoder_frames(double duration) const;
  bool feasible(const UtteranceRecord &r) const;
};

/// Keeps min_dur <= duration <= max_dur and, with a check, records whose
/// 2 * tokens + 1 fits in the subsampled frame count.
Manifest manifest_filter(const Manifest &m, double min_dur, double max_dur,
                         const FeasibilityCheck *check = nullptr);

/// "dir/x.wav" at 0.9 -> "dir/x-sp0.9.wav".
std::string speed_audio_path(std::string_view audio, double factor);
std::string speed_suffix(double factor);

/// Original record followed by one perturbed copy per factor (1.0 is the
/// original and is not repeated). Duplicate factors or a generated id that
/// collides with an existing one are errors.
Manifest manifest_expand_speed(const Manifest &m, std::span<const double> factors);

/// core followed by additional, the latter tagged with origin_tag.
Manifest manifest_merge(const Manifest &core, const Manifest &additional,
                        Origin origin_tag);

struct PseudoLabelResult {
  Manifest manifest;
  std::size_t dropped = 0;                // records with no hypothesis
  std::vector<std::string> unknown_ids;  // hypotheses with no record
};

PseudoLabelResult attach_pseudo_labels(const Manifest &m, const TranscriptMap &hyps);

}  // namespace sforge
