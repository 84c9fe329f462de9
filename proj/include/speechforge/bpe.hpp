// speechforge/bpe.hpp

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
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "speechforge/types.hpp"

namespace sforge {

/// U+2581, prefixed to the first symbol of every word.
inline constexpr std::string_view kWordBoundary = "\xE2\x96\x81";
inline constexpr std::string_view kBlankToken = "<blank>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr int kDefaultBpeVocab = 5000;

/// Splits UTF-8 text into code points (invalid bytes become single units).
std::vector<std::string> utf8_chars(std::string_view s);

/// Ordering used for merge tie-breaks: plain byte order except that the word
/// boundary marker sorts before every character.
bool symbol_less(std::string_view a, std::string_view b);

/// Byte-pair-encoding subword model.
///
/// Token ids: specials first (<blank> = 0, <unk> = 1), then base symbols in
/// symbol_less order, then one id per merge result not already present. A
/// word's first symbol carries the boundary marker, so "low" starts as
/// [▁l, o, w]; whitespace is never a token.
class BpeModel {
 public:
  std::size_t vocab_size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }
  const std::vector<std::string> &base_symbols() const { return base_; }
  const std::vector<std::pair<std::string, std::string>> &merges() const {
    return merges_;
  }
  const std::vector<std::string> &specials() const { return specials_; }

  int token_id(std::string_view token) const;  // -1 if absent
  const std::string &token(int id) const;
  int unk_id() const { return 1; }
  int blank_id() const { return 0; }

  /// Encodes whitespace-separated words. Characters outside the base
  /// alphabet become <unk>.
  std::vector<int> encode(std::string_view text) const;
  std::vector<std::string> encode_pieces(std::string_view text) const;
  /// Throws Error on an id outside the vocabulary.
  std::string decode(const std::vector<int> &ids) const;

  void save(std::ostream &out) const;
  static BpeModel load(std::istream &in);
  void save(const std::filesystem::path &path) const;
  static BpeModel load(const std::filesystem::path &path);

  /// Rebuilds ids and lookup tables from base/merges/specials.
  static BpeModel from_parts(std::vector<std::string> base,
                             std::vector<std::pair<std::string, std::string>> merges,
                             std::vector<std::string> specials);

 private:
  std::vector<int> encode_word(std::string_view word) const;

  std::vector<std::string> base_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::vector<std::string> specials_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  std::map<std::pair<int, int>, int> merge_rank_;
};

/// Joins token strings back into text: a token starting with the boundary
/// marker opens a new word. Special tokens are dropped.
std::string detokenize(const std::vector<std::string> &pieces);

/// Greedy most-frequent-pair merging until the vocabulary reaches
/// vocab_size or no pair occurs at least twice; ties go to the
/// symbol_less-smallest pair. vocab_size counts specials and base symbols.
BpeModel bpe_train(const std::vector<std::string> &corpus, int vocab_size);

}  // namespace sforge
