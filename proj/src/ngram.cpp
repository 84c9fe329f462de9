// src/ngram.cpp

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

#include "speechforge/ngram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace sforge {

namespace {

constexpr std::string_view kNGramHeader = "#speechforge-ngram v1";

std::string join(std::span<const std::string> toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    out += toks[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string &s) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("ngram model: bad number '" + s + "'");
  return v;
}

// Per-context follower counts for one history.
struct ContextCounts {
  std::map<std::string, long> followers;
  long total = 0;
};

}  // namespace

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(line)};
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

Smoothing parse_smoothing(std::string_view name) {
  if (name == "add_k" || name == "addk") return Smoothing::kAddK;
  if (name == "witten_bell" || name == "wb") return Smoothing::kWittenBell;
  throw Error("unknown smoothing '" + std::string(name) + "' (add_k | witten_bell)");
}

std::string_view smoothing_name(Smoothing s) {
  return s == Smoothing::kAddK ? "add_k" : "witten_bell";
}

bool NGramModel::in_vocab(std::string_view token) const {
  return vocab_index_.count(std::string(token)) > 0;
}

std::string NGramModel::map_token(std::string_view t, bool allow_start) const {
  if (allow_start && t == kSentenceStart) return std::string(t);
  if (in_vocab(t)) return std::string(t);
  if (!in_vocab(kNGramUnk))
    throw Error("ngram: token '" + std::string(t) + "' not in the closed vocabulary");
  return std::string(kNGramUnk);
}

double NGramModel::lookup(const std::vector<std::string> &context,
                          const std::string &token) const {
  double acc = 0.0;
  for (std::size_t skip = 0; skip <= context.size(); ++skip) {
    std::span<const std::string> h(context.data() + skip, context.size() - skip);
    std::string key = join(h);
    const std::string gram = key.empty() ? token : key + ' ' + token;
    if (auto it = prob_.find(gram); it != prob_.end()) return acc + it->second;
    if (!key.empty())
      if (auto bo = backoff_.find(key); bo != backoff_.end()) acc += bo->second;
  }
  throw Error("ngram: token '" + token + "' missing from the unigram table");
}

double NGramModel::logprob(std::span<const std::string> context,
                           std::string_view token) const {
  const std::size_t keep =
      std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  std::vector<std::string> h;
  h.reserve(keep);
  for (std::size_t i = context.size() - keep; i < context.size(); ++i)
    h.push_back(map_token(context[i], true));
  // Anything before a sentence start is unreachable history.
  for (std::size_t i = h.size(); i-- > 0;)
    if (h[i] == kSentenceStart) {
      h.erase(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  return lookup(h, map_token(token, false));
}

double NGramModel::sentence_logprob(std::span<const std::string> tokens) const {
  std::vector<std::string> seq{std::string(kSentenceStart)};
  seq.insert(seq.end(), tokens.begin(), tokens.end());
  seq.emplace_back(kSentenceEnd);
  double total = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i)
    total += logprob(std::span<const std::string>(seq.data(), i), seq[i]);
  return total;
}

double ngram_logprob(const NGramModel &model, std::span<const std::string> context,
                     std::string_view token) {
  return model.logprob(context, token);
}

NGramModel ngram_train(const std::vector<std::string> &corpus,
                       const NGramTrainOptions &opts) {
  if (opts.order < 1) throw Error("ngram_train: order must be >= 1");
  if (opts.smoothing == Smoothing::kAddK && !(opts.k >= 0.0))
    throw Error("ngram_train: add-k requires k >= 0");

  std::vector<std::vector<std::string>> sentences;
  for (const std::string &line : corpus) {
    auto toks = split_tokens(line);
    if (!toks.empty()) sentences.push_back(std::move(toks));
  }
  if (sentences.empty()) throw Error("ngram_train: empty corpus");

  NGramModel m;
  m.order_ = opts.order;
  m.smoothing_ = opts.smoothing;
  if (opts.vocab.empty()) {
    std::set<std::string> seen;
    for (const auto &s : sentences) seen.insert(s.begin(), s.end());
    seen.erase(std::string(kSentenceStart));
    seen.emplace(kSentenceEnd);
    seen.emplace(kNGramUnk);
    m.vocab_.assign(seen.begin(), seen.end());
  } else {
    std::set<std::string> v(opts.vocab.begin(), opts.vocab.end());
    if (v.size() != opts.vocab.size()) throw Error("ngram_train: duplicate vocabulary entry");
    if (v.count(std::string(kSentenceStart)))
      throw Error("ngram_train: <s> cannot be a predicted token");
    if (!v.count(std::string(kSentenceEnd)))
      throw Error("ngram_train: closed vocabulary must contain </s>");
    m.vocab_ = opts.vocab;
  }
  for (std::size_t i = 0; i < m.vocab_.size(); ++i)
    m.vocab_index_.emplace(m.vocab_[i], static_cast<int>(i));

  // counts[L][history] for history length L.
  std::vector<std::map<std::string, ContextCounts>> counts(opts.order);
  for (const auto &s : sentences) {
    std::vector<std::string> seq{std::string(kSentenceStart)};
    for (const std::string &t : s) seq.push_back(m.map_token(t, false));
    seq.emplace_back(kSentenceEnd);
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const std::size_t max_len = std::min<std::size_t>(opts.order - 1, i);
      for (std::size_t len = 0; len <= max_len; ++len) {
        const std::string h =
            join(std::span<const std::string>(seq.data() + i - len, len));
        ContextCounts &c = counts[len][h];
        ++c.followers[seq[i]];
        ++c.total;
      }
    }
  }

  const double vsize = static_cast<double>(m.vocab_.size());
  auto gram_key = [](const std::string &h, const std::string &w) {
    return h.empty() ? w : h + ' ' + w;
  };
  auto split_context = [](const std::string &h) { return split_tokens(h); };

  for (int len = 0; len < opts.order; ++len) {
    for (const auto &[h, c] : counts[len]) {
      const double total = static_cast<double>(c.total);
      if (opts.smoothing == Smoothing::kAddK) {
        // Full rows: every vocabulary token under every seen history.
        const double denom = total + opts.k * vsize;
        for (const std::string &w : m.vocab_) {
          auto it = c.followers.find(w);
          const double cw = it == c.followers.end() ? 0.0 : static_cast<double>(it->second);
          m.prob_[gram_key(h, w)] = std::log((cw + opts.k) / denom);
        }
        if (len > 0) m.backoff_[h] = 0.0;
        continue;
      }
      const double types = static_cast<double>(c.followers.size());
      const double denom = total + types;
      const std::vector<std::string> ctx = split_context(h);
      auto lower = [&](const std::string &w) {
        if (len == 0) return 1.0 / vsize;
        std::vector<std::string> shorter(ctx.begin() + 1, ctx.end());
        return std::exp(m.lookup(shorter, w));
      };
      if (len == 0) {
        for (const std::string &w : m.vocab_) {
          auto it = c.followers.find(w);
          const double cw = it == c.followers.end() ? 0.0 : static_cast<double>(it->second);
          m.prob_[w] = std::log((cw + types * lower(w)) / denom);
        }
      } else {
        for (const auto &[w, cw] : c.followers)
          m.prob_[gram_key(h, w)] =
              std::log((static_cast<double>(cw) + types * lower(w)) / denom);
        m.backoff_[h] = std::log(types / denom);
      }
    }
  }
  return m;
}

void NGramModel::save(std::ostream &out) const {
  out << kNGramHeader << '\n';
  out << "order " << order_ << '\n';
  out << "smoothing " << smoothing_name(smoothing_) << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (const auto &v : vocab_) out << v << '\n';

  // Every probability key plus any backoff-only history (e.g. "<s>").
  std::vector<std::pair<std::size_t, std::string>> keys;
  auto arity = [](const std::string &k) {
    return static_cast<std::size_t>(std::count(k.begin(), k.end(), ' ')) + 1;
  };
  for (const auto &[k, v] : prob_) keys.emplace_back(arity(k), k);
  for (const auto &[k, v] : backoff_)
    if (!prob_.count(k)) keys.emplace_back(arity(k), k);
  std::sort(keys.begin(), keys.end());

  out << "rows " << keys.size() << '\n';
  for (const auto &[n, key] : keys) {
    const auto sp = key.rfind(' ');
    const std::string ctx = sp == std::string::npos ? "-" : key.substr(0, sp);
    const std::string tok = sp == std::string::npos ? key : key.substr(sp + 1);
    auto p = prob_.find(key);
    auto b = backoff_.find(key);
    out << ctx << '\t' << tok << '\t'
        << (p == prob_.end() ? std::string("-inf") : format_double(p->second)) << '\t'
        << (b == backoff_.end() ? std::string("0") : format_double(b->second)) << '\n';
  }
}

NGramModel NGramModel::load(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != kNGramHeader)
    throw Error("ngram model: missing header '" + std::string(kNGramHeader) + "'");
  auto field = [&](const std::string &name) {
    if (!std::getline(in, line)) throw Error("ngram model: missing " + name);
    std::istringstream ss(line);
    std::string tag, value;
    if (!(ss >> tag >> value) || tag != name)
      throw Error("ngram model: expected '" + name + "', got '" + line + "'");
    return value;
  };
  NGramModel m;
  m.order_ = std::stoi(field("order"));
  if (m.order_ < 1) throw Error("ngram model: order must be >= 1");
  m.smoothing_ = parse_smoothing(field("smoothing"));
  const std::size_t nv = std::stoul(field("vocab"));
  for (std::size_t i = 0; i < nv; ++i) {
    if (!std::getline(in, line)) throw Error("ngram model: truncated vocabulary");
    m.vocab_index_.emplace(line, static_cast<int>(m.vocab_.size()));
    m.vocab_.push_back(line);
  }
  const std::size_t nr = std::stoul(field("rows"));
  for (std::size_t i = 0; i < nr; ++i) {
    if (!std::getline(in, line)) throw Error("ngram model: truncated rows");
    std::vector<std::string> cols;
    std::istringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (cols.size() != 4)
      throw Error("ngram model: row " + std::to_string(i + 1) + " needs 4 tab-separated fields");
    const std::string key = cols[0] == "-" ? cols[1] : cols[0] + ' ' + cols[1];
    const double lp = parse_double(cols[2]);
    const double bo = parse_double(cols[3]);
    if (cols[1] != kSentenceStart || std::isfinite(lp)) m.prob_[key] = lp;
    if (bo != 0.0 || cols[1] == kSentenceStart) m.backoff_[key] = bo;
  }
  return m;
}

void NGramModel::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  save(out);
}

NGramModel NGramModel::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open language model " + path.string());
  return load(in);
}

}  // namespace sforge
