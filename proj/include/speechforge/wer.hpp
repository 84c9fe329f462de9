// speechforge/wer.hpp

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

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "speechforge/types.hpp"

namespace sforge {

struct WerBreakdown {
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long ref_words = 0;

  long errors() const { return substitutions + deletions + insertions; }
  double wer() const;  // percent
  WerBreakdown &operator+=(const WerBreakdown &o);
};

/// Unit-cost Levenshtein alignment. Among minimal-cost alignments the one
/// with fewer insertions wins, then fewer deletions. Throws on empty ref.
WerBreakdown wer(const std::vector<std::string> &ref, const std::vector<std::string> &hyp);
WerBreakdown wer(std::string_view ref, std::string_view hyp);

/// Transcripts keyed by utterance id.
using TranscriptMap = std::map<std::string, std::string>;

/// Pooled counts over every hypothesis id. A hypothesis without a reference
/// is an Error, as is an empty set.
WerBreakdown corpus_wer(const TranscriptMap &refs, const TranscriptMap &hyps,
                        std::map<std::string, WerBreakdown> *per_utt = nullptr);

/// Lines "UTTID TRANSCRIPT"; a line with only an id has an empty transcript.
TranscriptMap read_transcripts(std::istream &in);
TranscriptMap read_transcripts(const std::string &path);

/// 100 * (baseline - system) / baseline. Throws when baseline <= 0.
double relative_improvement(double baseline_wer, double system_wer);

/// Fixed one-decimal rendering used by reports.
std::string format_percent(double value);

std::string format_wer_report(const WerBreakdown &w);

}  // namespace sforge
