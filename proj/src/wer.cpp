// src/wer.cpp

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

#include "speechforge/wer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "speechforge/ngram.hpp"

namespace sforge {

double WerBreakdown::wer() const {
  if (ref_words <= 0) throw Error("wer: empty reference");
  return 100.0 * static_cast<double>(errors()) / static_cast<double>(ref_words);
}

WerBreakdown &WerBreakdown::operator+=(const WerBreakdown &o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_words += o.ref_words;
  return *this;
}

WerBreakdown wer(const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
  if (ref.empty()) throw Error("wer: empty reference");
  // Cells hold (cost, insertions, deletions), compared lexicographically.
  using Cell = std::tuple<long, long, long>;
  const std::size_t R = ref.size(), H = hyp.size();
  std::vector<std::vector<Cell>> d(R + 1, std::vector<Cell>(H + 1));
  for (std::size_t i = 1; i <= R; ++i) d[i][0] = {static_cast<long>(i), 0, static_cast<long>(i)};
  for (std::size_t j = 1; j <= H; ++j) d[0][j] = {static_cast<long>(j), static_cast<long>(j), 0};
  for (std::size_t i = 1; i <= R; ++i) {
    for (std::size_t j = 1; j <= H; ++j) {
      auto [dc, di, dd] = d[i - 1][j - 1];
      Cell diag{dc + (ref[i - 1] == hyp[j - 1] ? 0 : 1), di, dd};
      auto [uc, ui, ud] = d[i - 1][j];
      Cell del{uc + 1, ui, ud + 1};
      auto [lc, li, ld] = d[i][j - 1];
      Cell ins{lc + 1, li + 1, ld};
      d[i][j] = std::min({diag, del, ins});
    }
  }
  const auto [cost, ins, del] = d[R][H];
  WerBreakdown out;
  out.insertions = ins;
  out.deletions = del;
  out.substitutions = cost - ins - del;
  out.ref_words = static_cast<long>(R);
  return out;
}

WerBreakdown wer(std::string_view ref, std::string_view hyp) {
  return wer(split_tokens(ref), split_tokens(hyp));
}

WerBreakdown corpus_wer(const TranscriptMap &refs, const TranscriptMap &hyps,
                        std::map<std::string, WerBreakdown> *per_utt) {
  if (hyps.empty()) throw Error("corpus_wer: no hypotheses");
  WerBreakdown total;
  for (const auto &[id, hyp] : hyps) {
    auto it = refs.find(id);
    if (it == refs.end()) throw Error("corpus_wer: no reference for utterance " + id);
    const WerBreakdown w = wer(it->second, hyp);
    if (per_utt) (*per_utt)[id] = w;
    total += w;
  }
  return total;
}

TranscriptMap read_transcripts(std::istream &in) {
  TranscriptMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string id;
    if (!(ss >> id)) continue;
    std::string rest;
    std::getline(ss, rest);
    const auto start = rest.find_first_not_of(" \t");
    rest = start == std::string::npos ? "" : rest.substr(start);
    if (!out.emplace(id, rest).second)
      throw Error("transcripts line " + std::to_string(lineno) + ": duplicate id " + id);
  }
  return out;
}

TranscriptMap read_transcripts(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcripts " + path);
  return read_transcripts(in);
}

double relative_improvement(double baseline_wer, double system_wer) {
  if (!(baseline_wer > 0.0)) throw Error("relative_improvement: baseline WER must be > 0");
  return 100.0 * (baseline_wer - system_wer) / baseline_wer;
}

std::string format_percent(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

std::string format_wer_report(const WerBreakdown &w) {
  std::ostringstream ss;
  ss << "%WER " << format_percent(w.wer()) << " [ " << w.errors() << " / " << w.ref_words
     << ", " << w.insertions << " ins, " << w.deletions << " del, " << w.substitutions
     << " sub ]";
  return ss.str();
}

}  // namespace sforge
