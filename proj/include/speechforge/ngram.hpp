// speechforge/ngram.hpp

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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "speechforge/types.hpp"

namespace sforge {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kNGramUnk = "<unk>";

enum class Smoothing { kAddK, kWittenBell };

Smoothing parse_smoothing(std::string_view name);
std::string_view smoothing_name(Smoothing s);

struct NGramTrainOptions {
  int order = 4;
  Smoothing smoothing = Smoothing::kWittenBell;
  double k = 1.0;  // add-k only
  // Closed event space. When empty the vocabulary is every training token
  // plus </s> and <unk>. Corpus tokens outside a closed vocabulary map to
  // <unk>, which must then be listed.
  std::vector<std::string> vocab;
};

/// Backoff n-gram model in natural-log probabilities.
///
/// Rows are keyed by the full n-gram (context + token). A query that misses
/// at context h adds backoff(h) and retries with h minus its oldest token;
/// the unigram level lists every vocabulary entry, so the search always ends.
/// <s> is a context-only symbol and is never predicted.
class NGramModel {
 public:
  int order() const { return order_; }
  Smoothing smoothing() const { return smoothing_; }
  const std::vector<std::string> &vocab() const { return vocab_; }
  bool in_vocab(std::string_view token) const;

  /// log p(token | context). Only the last order-1 context tokens are used.
  /// Unknown tokens (context or predicted) are read as <unk>; a closed
  /// vocabulary without <unk> makes them an Error.
  double logprob(std::span<const std::string> context, std::string_view token) const;

  /// Sum of log p over the tokens of a sentence, including </s>.
  double sentence_logprob(std::span<const std::string> tokens) const;

  std::size_t num_rows() const { return prob_.size(); }

  void save(std::ostream &out) const;
  static NGramModel load(std::istream &in);
  void save(const std::filesystem::path &path) const;
  static NGramModel load(const std::filesystem::path &path);

 private:
  friend NGramModel ngram_train(const std::vector<std::string> &corpus,
                                const NGramTrainOptions &opts);

  std::string map_token(std::string_view t, bool allow_start) const;
  double lookup(const std::vector<std::string> &context, const std::string &token) const;

  int order_ = 1;
  Smoothing smoothing_ = Smoothing::kWittenBell;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> vocab_index_;
  // Keys are space-joined token sequences.
  std::unordered_map<std::string, double> prob_;
  std::unordered_map<std::string, double> backoff_;
};

/// Counts "<s> w1 .. wn </s>" per line; histories are truncated at the
/// sentence start rather than padded.
NGramModel ngram_train(const std::vector<std::string> &corpus,
                       const NGramTrainOptions &opts = {});

double ngram_logprob(const NGramModel &model, std::span<const std::string> context,
                     std::string_view token);

std::vector<std::string> split_tokens(std::string_view line);

}  // namespace sforge
