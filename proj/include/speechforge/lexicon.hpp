// speechforge/lexicon.hpp

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
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "speechforge/types.hpp"

namespace sforge {

using Pronunciation = std::vector<std::string>;

/// Word -> pronunciations, words stored uppercase. Pronunciations keep file
/// order; lookup returns the first.
class Lexicon {
 public:
  /// Lines "WORD<TAB>PH1 PH2 ..."; lines without a tab split on the first
  /// run of whitespace. Blank lines and lines starting with ';' are skipped.
  static Lexicon load(std::istream &in);
  static Lexicon load(const std::filesystem::path &path);

  void add(std::string_view word, Pronunciation pron);

  bool contains(std::string_view word) const;
  const std::vector<Pronunciation> &pronunciations(std::string_view word) const;
  const std::set<std::string> &phonemes() const { return phonemes_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<Pronunciation>, std::less<>> entries_;
  std::set<std::string> phonemes_;
};

enum class OovPolicy {
  kStrict,    // throw OovError
  kSpellOut,  // concatenate the pronunciations of the word's letters
};

class OovError : public Error {
 public:
  explicit OovError(const std::string &word)
      : Error("out-of-vocabulary word: " + word), word_(word) {}
  const std::string &word() const { return word_; }

 private:
  std::string word_;
};

std::string to_upper(std::string_view s);

Pronunciation lexicon_lookup(std::string_view word, const Lexicon &lex,
                             OovPolicy policy = OovPolicy::kStrict);

}  // namespace sforge
