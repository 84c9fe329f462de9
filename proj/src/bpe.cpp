// src/bpe.cpp

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

#include "speechforge/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace sforge {

namespace {

constexpr std::string_view kBpeHeader = "#speechforge-bpe v1";

bool starts_with_boundary(std::string_view s) {
  return s.substr(0, kWordBoundary.size()) == kWordBoundary;
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

std::vector<std::string> initial_symbols(std::string_view word) {
  std::vector<std::string> chars = utf8_chars(word);
  if (!chars.empty()) chars[0] = std::string(kWordBoundary) + chars[0];
  return chars;
}

std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if ((lead & 0xE0) == 0xC0) len = 2;
    else if ((lead & 0xF0) == 0xE0) len = 3;
    else if ((lead & 0xF8) == 0xF0) len = 4;
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

bool symbol_less(std::string_view a, std::string_view b) {
  const bool ma = starts_with_boundary(a), mb = starts_with_boundary(b);
  const std::string ka = ma ? "\x01" + std::string(a.substr(kWordBoundary.size())) : std::string(a);
  const std::string kb = mb ? "\x01" + std::string(b.substr(kWordBoundary.size())) : std::string(b);
  return ka < kb;
}

int BpeModel::token_id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? -1 : it->second;
}

const std::string &BpeModel::token(int id) const {
  if (id < 0 || id >= static_cast<int>(tokens_.size()))
    throw Error("bpe: token id " + std::to_string(id) + " outside vocabulary of " +
                std::to_string(tokens_.size()));
  return tokens_[id];
}

BpeModel BpeModel::from_parts(
    std::vector<std::string> base,
    std::vector<std::pair<std::string, std::string>> merges,
    std::vector<std::string> specials) {
  BpeModel m;
  m.base_ = std::move(base);
  m.merges_ = std::move(merges);
  m.specials_ = std::move(specials);
  if (m.specials_.size() < 2 || m.specials_[0] != kBlankToken ||
      m.specials_[1] != kUnkToken)
    throw Error("bpe: specials must start with <blank> <unk>");
  auto add = [&m](const std::string &t) {
    if (m.ids_.emplace(t, static_cast<int>(m.tokens_.size())).second)
      m.tokens_.push_back(t);
  };
  for (const auto &s : m.specials_) add(s);
  for (const auto &s : m.base_) add(s);
  for (std::size_t r = 0; r < m.merges_.size(); ++r) {
    const auto &[a, b] = m.merges_[r];
    const int ia = m.token_id(a), ib = m.token_id(b);
    if (ia < 0 || ib < 0)
      throw Error("bpe: merge " + std::to_string(r) + " uses an unknown symbol");
    add(a + b);
    m.merge_rank_.emplace(std::make_pair(ia, ib), static_cast<int>(r));
  }
  return m;
}

std::vector<int> BpeModel::encode_word(std::string_view word) const {
  std::vector<int> syms;
  for (const std::string &s : initial_symbols(word)) {
    const int id = token_id(s);
    syms.push_back(id < 0 ? unk_id() : id);
  }
  for (;;) {
    int best_rank = std::numeric_limits<int>::max();
    std::pair<int, int> best{-1, -1};
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = merge_rank_.find({syms[i], syms[i + 1]});
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best = it->first;
      }
    }
    if (best.first < 0) break;
    const auto &[a, b] = merges_[best_rank];
    const int merged = ids_.at(a + b);
    std::vector<int> next;
    next.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i) {
      if (i + 1 < syms.size() && syms[i] == best.first && syms[i + 1] == best.second) {
        next.push_back(merged);
        ++i;
      } else {
        next.push_back(syms[i]);
      }
    }
    syms = std::move(next);
  }
  return syms;
}

std::vector<int> BpeModel::encode(std::string_view text) const {
  std::vector<int> out;
  for (std::string_view w : split_words(text)) {
    auto ids = encode_word(w);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

std::vector<std::string> BpeModel::encode_pieces(std::string_view text) const {
  std::vector<std::string> out;
  for (int id : encode(text)) out.push_back(tokens_[id]);
  return out;
}

std::string detokenize(const std::vector<std::string> &pieces) {
  std::string out;
  for (const std::string &p : pieces) {
    if (p == kBlankToken) continue;
    if (starts_with_boundary(p)) {
      if (!out.empty()) out += ' ';
      out += p.substr(kWordBoundary.size());
    } else {
      out += p;
    }
  }
  return out;
}

std::string BpeModel::decode(const std::vector<int> &ids) const {
  std::vector<std::string> pieces;
  pieces.reserve(ids.size());
  for (int id : ids) pieces.push_back(token(id));
  return detokenize(pieces);
}

void BpeModel::save(std::ostream &out) const {
  out << kBpeHeader << '\n';
  out << "base " << base_.size() << '\n';
  for (const auto &s : base_) out << s << '\n';
  out << "merges " << merges_.size() << '\n';
  for (const auto &[a, b] : merges_) out << a << ' ' << b << '\n';
  out << "specials " << specials_.size() << '\n';
  for (const auto &s : specials_) out << s << '\n';
}

BpeModel BpeModel::load(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != kBpeHeader)
    throw Error("bpe model: missing header '" + std::string(kBpeHeader) + "'");
  auto section = [&](const std::string &name) -> std::size_t {
    if (!std::getline(in, line)) throw Error("bpe model: missing section " + name);
    std::istringstream ss(line);
    std::string tag;
    std::size_t n = 0;
    if (!(ss >> tag >> n) || tag != name)
      throw Error("bpe model: expected section '" + name + "', got '" + line + "'");
    return n;
  };
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw Error("bpe model: truncated file");
    return line;
  };
  std::vector<std::string> base, specials;
  std::vector<std::pair<std::string, std::string>> merges;
  for (std::size_t i = 0, n = section("base"); i < n; ++i) base.push_back(next_line());
  for (std::size_t i = 0, n = section("merges"); i < n; ++i) {
    const std::string l = next_line();
    const auto sp = l.find(' ');
    if (sp == std::string::npos) throw Error("bpe model: malformed merge '" + l + "'");
    merges.emplace_back(l.substr(0, sp), l.substr(sp + 1));
  }
  for (std::size_t i = 0, n = section("specials"); i < n; ++i)
    specials.push_back(next_line());
  return from_parts(std::move(base), std::move(merges), std::move(specials));
}

void BpeModel::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  save(out);
}

BpeModel BpeModel::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open bpe model " + path.string());
  return load(in);
}

BpeModel bpe_train(const std::vector<std::string> &corpus, int vocab_size) {
  std::map<std::string, long> word_freq;
  for (const std::string &line : corpus)
    for (std::string_view w : split_words(line)) ++word_freq[std::string(w)];
  if (word_freq.empty()) throw Error("bpe_train: empty corpus");

  std::vector<std::string> sym;
  std::unordered_map<std::string, int> sym_id;
  auto intern = [&](const std::string &s) {
    auto [it, fresh] = sym_id.emplace(s, static_cast<int>(sym.size()));
    if (fresh) sym.push_back(s);
    return it->second;
  };

  struct Word {
    std::vector<int> syms;
    long freq;
  };
  std::vector<Word> words;
  for (const auto &[w, f] : word_freq) {
    Word word{{}, f};
    for (const std::string &s : initial_symbols(w)) word.syms.push_back(intern(s));
    words.push_back(std::move(word));
  }

  std::vector<std::string> base = sym;
  std::sort(base.begin(), base.end(),
            [](const std::string &a, const std::string &b) { return symbol_less(a, b); });
  const std::vector<std::string> specials{std::string(kBlankToken),
                                          std::string(kUnkToken)};
  std::size_t vocab = specials.size() + base.size();
  if (vocab_size < 0 || static_cast<std::size_t>(vocab_size) < vocab)
    throw Error("bpe_train: vocab_size " + std::to_string(vocab_size) +
                " is below the " + std::to_string(vocab) +
                " specials and base symbols");

  std::unordered_map<std::uint64_t, long> counts;
  std::unordered_map<std::uint64_t, std::vector<int>> where;
  auto add_pairs = [&](int idx, long sign) {
    const Word &w = words[idx];
    for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
      const std::uint64_t key = pair_key(w.syms[i], w.syms[i + 1]);
      long &c = counts[key];
      c += sign * w.freq;
      if (c == 0) counts.erase(key);
      if (sign > 0) where[key].push_back(idx);
    }
  };
  for (int i = 0; i < static_cast<int>(words.size()); ++i) add_pairs(i, +1);

  std::vector<std::pair<std::string, std::string>> merges;
  std::vector<int> stamp(words.size(), -1);
  while (vocab < static_cast<std::size_t>(vocab_size)) {
    std::uint64_t best = 0;
    long best_count = 1;
    for (const auto &[key, c] : counts) {
      if (c < 2 || c < best_count) continue;
      if (c > best_count) {
        best = key;
        best_count = c;
        continue;
      }
      const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      const int ba = static_cast<int>(best >> 32), bb = static_cast<int>(best & 0xffffffffu);
      if (symbol_less(sym[a], sym[ba]) || (a == ba && symbol_less(sym[b], sym[bb])))
        best = key;
    }
    if (best_count < 2) break;

    const int a = static_cast<int>(best >> 32), b = static_cast<int>(best & 0xffffffffu);
    const std::size_t before = sym.size();
    const int merged = intern(sym[a] + sym[b]);
    if (sym.size() > before) ++vocab;
    merges.emplace_back(sym[a], sym[b]);

    const std::vector<int> affected = std::move(where[best]);
    where.erase(best);
    const int round = static_cast<int>(merges.size());
    for (int idx : affected) {
      if (stamp[idx] == round) continue;
      stamp[idx] = round;
      Word &w = words[idx];
      bool present = false;
      for (std::size_t i = 0; i + 1 < w.syms.size() && !present; ++i)
        present = w.syms[i] == a && w.syms[i + 1] == b;
      if (!present) continue;
      add_pairs(idx, -1);
      std::vector<int> next;
      next.reserve(w.syms.size());
      for (std::size_t i = 0; i < w.syms.size(); ++i) {
        if (i + 1 < w.syms.size() && w.syms[i] == a && w.syms[i + 1] == b) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(w.syms[i]);
        }
      }
      w.syms = std::move(next);
      add_pairs(idx, +1);
    }
    counts.erase(best);
  }
  return BpeModel::from_parts(std::move(base), std::move(merges), specials);
}

}  // namespace sforge
