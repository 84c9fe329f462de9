// src/lexicon.cpp

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

#include "speechforge/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace sforge {

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void Lexicon::add(std::string_view word, Pronunciation pron) {
  if (word.empty()) throw Error("lexicon: empty word");
  if (pron.empty()) throw Error("lexicon: empty pronunciation for " + std::string(word));
  for (const std::string &ph : pron) phonemes_.insert(ph);
  entries_[to_upper(word)].push_back(std::move(pron));
}

Lexicon Lexicon::load(std::istream &in) {
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == ';') continue;
    std::size_t split = line.find('\t');
    if (split == std::string::npos) split = line.find_first_of(" \t");
    if (split == std::string::npos)
      throw Error("lexicon line " + std::to_string(lineno) + ": no pronunciation");
    std::istringstream phones(line.substr(split + 1));
    Pronunciation pron;
    for (std::string ph; phones >> ph;) pron.push_back(ph);
    if (pron.empty())
      throw Error("lexicon line " + std::to_string(lineno) + ": empty pronunciation");
    lex.add(line.substr(0, split), std::move(pron));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon " + path.string());
  return load(in);
}

bool Lexicon::contains(std::string_view word) const {
  return entries_.find(to_upper(word)) != entries_.end();
}

const std::vector<Pronunciation> &Lexicon::pronunciations(
    std::string_view word) const {
  auto it = entries_.find(to_upper(word));
  if (it == entries_.end()) throw OovError(to_upper(word));
  return it->second;
}

Pronunciation lexicon_lookup(std::string_view word, const Lexicon &lex,
                             OovPolicy policy) {
  const std::string key = to_upper(word);
  if (lex.contains(key)) return lex.pronunciations(key).front();
  if (policy == OovPolicy::kStrict || key.empty()) throw OovError(key);
  Pronunciation out;
  for (char c : key) {
    const std::string letter(1, c);
    if (!lex.contains(letter)) throw OovError(key);
    const Pronunciation &p = lex.pronunciations(letter).front();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace sforge
