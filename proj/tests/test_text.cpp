// tests/test_text.cpp

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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "speechforge/bpe.hpp"
#include "speechforge/lexicon.hpp"
#include "speechforge/ngram.hpp"
#include "support.hpp"

using namespace sforge;
using sforge::testing::Gen;

namespace {

std::filesystem::path temp_file(const std::string &name, const std::string &body) {
  const auto p = std::filesystem::temp_directory_path() / ("sforge_text_" + name);
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::string to_bytes(const BpeModel &m) {
  std::ostringstream os;
  m.save(os);
  return os.str();
}

// Most frequent adjacent pair over boundary-marked character sequences,
// counted by brute force; ties go to the smaller pair under symbol_less.
std::pair<std::string, std::string> first_merge_oracle(const std::vector<std::string> &corpus) {
  std::map<std::pair<std::string, std::string>, long> counts;
  for (const std::string &line : corpus) {
    std::istringstream in(line);
    for (std::string w; in >> w;) {
      auto chars = utf8_chars(w);
      chars[0] = std::string(kWordBoundary) + chars[0];
      for (std::size_t i = 0; i + 1 < chars.size(); ++i) ++counts[{chars[i], chars[i + 1]}];
    }
  }
  std::pair<std::string, std::string> best;
  long best_count = 0;
  for (const auto &[p, c] : counts) {
    const bool tie_wins = c == best_count &&
                          (symbol_less(p.first, best.first) ||
                           (p.first == best.first && symbol_less(p.second, best.second)));
    if (c > best_count || tie_wins) best = p, best_count = c;
  }
  return best;
}

std::vector<std::string> ngram_events(const NGramModel &m) {
  return m.vocab();
}

double context_mass(const NGramModel &m, const std::vector<std::string> &ctx) {
  double sum = 0.0;
  for (const std::string &t : ngram_events(m)) sum += std::exp(m.logprob(ctx, t));
  return sum;
}

}  // namespace

TEST_CASE("lexicon lookup") {
  const auto path = temp_file("lex.txt",
                              "; comment\n"
                              "THE\tDH AH0\n"
                              "THE\tDH IY0\n"
                              "speech\tS P IY1 CH\n"
                              "A\tEY1\n"
                              "B\tB IY1\n");
  const Lexicon lex = Lexicon::load(path);
  CHECK(lex.size() == 4);
  CHECK(lexicon_lookup("THE", lex) == Pronunciation{"DH", "AH0"});
  CHECK(lexicon_lookup("the", lex) == lexicon_lookup("THE", lex));
  CHECK(lexicon_lookup("Speech", lex) == Pronunciation{"S", "P", "IY1", "CH"});
  CHECK(lex.pronunciations("the").size() == 2);
  CHECK(lex.phonemes().count("IY1") == 1);
  try {
    lexicon_lookup("zebra", lex);
    FAIL("expected an oov error");
  } catch (const OovError &e) {
    CHECK(e.word() == "ZEBRA");
  }
  CHECK(lexicon_lookup("ab", lex, OovPolicy::kSpellOut) == Pronunciation{"EY1", "B", "IY1"});
  CHECK_THROWS_AS(lexicon_lookup("abc", lex, OovPolicy::kSpellOut), OovError);
  std::istringstream bad("WORD\n");
  CHECK_THROWS_AS(Lexicon::load(bad), Error);
  std::filesystem::remove(path);
}

TEST_CASE("bpe first merge") {
  const std::vector<std::string> corpus{"low low lowest"};
  const BpeModel m = bpe_train(corpus, 1000);
  REQUIRE(!m.merges().empty());
  const auto want = first_merge_oracle(corpus);
  CHECK(want == std::pair<std::string, std::string>{std::string(kWordBoundary) + "l", "o"});
  CHECK(m.merges().front() == want);
  CHECK(m.vocab_size() == m.specials().size() + m.base_symbols().size() + m.merges().size());

  Gen g(61);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = testing::synthetic_corpus(g, 30, 6, 40);
    CHECK(bpe_train(c, 200).merges().front() == first_merge_oracle(c));
  }
}

TEST_CASE("bpe encoding replays merges") {
  const std::string b(kWordBoundary);
  const BpeModel m = BpeModel::from_parts({b + "l", "o", "w"}, {{b + "l", "o"}},
                                          {std::string(kBlankToken), std::string(kUnkToken)});
  CHECK(m.encode_pieces("low") == std::vector<std::string>{b + "lo", "w"});
  CHECK(m.decode(m.encode("low")) == "low");
  CHECK(m.encode("").empty());
  CHECK(m.encode("   ").empty());
  const auto ids = m.encode("lox");
  CHECK(ids.back() == m.unk_id());
  CHECK_THROWS_AS(m.decode({static_cast<int>(m.vocab_size())}), Error);
  CHECK_THROWS_AS(m.decode({-1}), Error);
}

TEST_CASE("bpe with no room for merges is a character model") {
  const std::vector<std::string> corpus{"low low lowest"};
  const BpeModel probe = bpe_train(corpus, 1000);
  const auto base = static_cast<int>(probe.base_symbols().size() + probe.specials().size());
  const BpeModel chars = bpe_train(corpus, base);
  CHECK(chars.merges().empty());
  CHECK(chars.vocab_size() == static_cast<std::size_t>(base));
  CHECK_THROWS_AS(bpe_train(corpus, base - 1), Error);
  CHECK_THROWS_AS(bpe_train({}, 100), Error);
  CHECK_THROWS_AS(bpe_train({"  "}, 100), Error);
}

TEST_CASE("bpe training is deterministic and round trips") {
  Gen g(62);
  const auto corpus = testing::synthetic_corpus(g, 200, 10, 500);
  const BpeModel a = bpe_train(corpus, 600);
  const BpeModel b = bpe_train(corpus, 600);
  CHECK(to_bytes(a) == to_bytes(b));
  std::istringstream in(to_bytes(a));
  const BpeModel c = BpeModel::load(in);
  CHECK(to_bytes(c) == to_bytes(a));
  for (const std::string &line : corpus) {
    const auto ids = a.encode(line);
    CHECK(a.decode(ids) == line);
    CHECK(c.encode(line) == ids);
    std::size_t chars = 0, words = 0;
    std::istringstream ws(line);
    for (std::string w; ws >> w; ++words) chars += utf8_chars(w).size();
    CHECK(ids.size() <= chars + words);
  }
  // Text over the base alphabet that never occurred still round trips.
  CHECK(a.decode(a.encode("zyx qwv")) == "zyx qwv");
}

TEST_CASE("bpe reaches the requested vocabulary") {
  Gen g(63);
  const auto corpus = testing::synthetic_corpus(g, 1000);
  const BpeModel m = bpe_train(corpus, kDefaultBpeVocab);
  CHECK(m.vocab_size() == 5000);
  CHECK(m.token(m.blank_id()) == kBlankToken);
  CHECK(m.token(m.unk_id()) == kUnkToken);
  for (const std::string &line : corpus) CHECK(m.decode(m.encode(line)) == line);
}

TEST_CASE("bpe handles multibyte text") {
  const std::vector<std::string> corpus{"über über übel", "naïve naïve"};
  const BpeModel m = bpe_train(corpus, 40);
  for (const auto &line : corpus) CHECK(m.decode(m.encode(line)) == line);
  CHECK(utf8_chars("aü▁").size() == 3);
}

TEST_CASE("n-gram count arithmetic") {
  NGramTrainOptions o;
  o.order = 2;
  o.smoothing = Smoothing::kAddK;
  o.k = 1.0;
  o.vocab = {"a", "b", "</s>"};
  const NGramModel m = ngram_train({"a b a b"}, o);
  const std::vector<std::string> a{"a"};
  CHECK(std::exp(m.logprob(a, "b")) == doctest::Approx(0.6).epsilon(1e-12));

  NGramTrainOptions u;
  u.order = 1;
  u.smoothing = Smoothing::kAddK;
  u.k = 0.0;
  u.vocab = {"a", "</s>"};
  const NGramModel uni = ngram_train({"a a a"}, u);
  CHECK(std::exp(uni.logprob({}, "a")) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::exp(uni.logprob({}, "</s>")) == doctest::Approx(0.25).epsilon(1e-12));

  NGramTrainOptions det = u;
  det.order = 2;
  const NGramModel bi = ngram_train({"a"}, det);
  CHECK(bi.logprob(a, "</s>") == 0.0);
  CHECK(bi.logprob(std::vector<std::string>{"<s>"}, "a") == 0.0);
}

TEST_CASE("n-gram normalization over reachable and random contexts") {
  Gen g(64);
  const auto corpus = testing::synthetic_corpus(g, 60, 8, 30);
  for (Smoothing sm : {Smoothing::kWittenBell, Smoothing::kAddK}) {
    for (int order = 1; order <= 4; ++order) {
      NGramTrainOptions o;
      o.order = order;
      o.smoothing = sm;
      o.k = 0.5;
      const NGramModel m = ngram_train(corpus, o);
      for (const std::string &line : corpus) {
        std::vector<std::string> ctx{"<s>"};
        for (const std::string &t : split_tokens(line)) {
          CHECK(context_mass(m, ctx) == doctest::Approx(1.0).epsilon(1e-6));
          ctx.push_back(t);
        }
        CHECK(context_mass(m, ctx) == doctest::Approx(1.0).epsilon(1e-6));
      }
      for (int i = 0; i < 20; ++i) {
        std::vector<std::string> ctx;
        for (long n = g.integer(0, 5); n > 0; --n)
          ctx.push_back(g.uniform() < 0.2 ? "neverseen" : m.vocab()[g.integer(0, m.vocab().size() - 1)]);
        CHECK(context_mass(m, ctx) == doctest::Approx(1.0).epsilon(1e-6));
        const double lp = m.logprob(ctx, "neverseen");
        CHECK(std::isfinite(lp));
        CHECK(lp < 0.0);
      }
    }
  }
}

TEST_CASE("n-gram persistence and errors") {
  Gen g(65);
  const auto corpus = testing::synthetic_corpus(g, 40, 7, 25);
  const NGramModel m = ngram_train(corpus);
  CHECK(m.order() == 4);
  CHECK(m.smoothing() == Smoothing::kWittenBell);
  std::ostringstream os;
  m.save(os);
  std::istringstream is(os.str());
  const NGramModel back = NGramModel::load(is);
  std::ostringstream os2;
  back.save(os2);
  CHECK(os.str() == os2.str());
  for (const std::string &line : corpus) {
    const auto toks = split_tokens(line);
    CHECK(back.sentence_logprob(toks) == m.sentence_logprob(toks));
    CHECK(ngram_logprob(m, toks, "</s>") == m.logprob(toks, "</s>"));
  }

  NGramTrainOptions bad;
  bad.order = 0;
  CHECK_THROWS_AS(ngram_train(corpus, bad), Error);
  CHECK_THROWS_AS(ngram_train({}, NGramTrainOptions{}), Error);
  CHECK(parse_smoothing("add_k") == Smoothing::kAddK);
  CHECK(parse_smoothing("witten_bell") == Smoothing::kWittenBell);
  CHECK_THROWS_AS(parse_smoothing("kneser"), Error);
  std::istringstream junk("not a model\n");
  CHECK_THROWS_AS(NGramModel::load(junk), Error);
}
