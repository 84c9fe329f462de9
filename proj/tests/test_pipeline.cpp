// tests/test_pipeline.cpp

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

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <sstream>

#include "speechforge/config.hpp"
#include "speechforge/manifest.hpp"
#include "speechforge/parallel.hpp"
#include "support.hpp"

using namespace sforge;

namespace {

UtteranceRecord rec(const std::string &id, double dur, const std::string &text = "HELLO") {
  return {id, "audio/" + id + ".wav", dur, text, "spk1", Origin::kReal};
}

Manifest numbered(const std::string &prefix, int n) {
  Manifest m;
  for (int i = 0; i < n; ++i) m.push_back(rec(prefix + std::to_string(i), 1.0 + i % 7));
  return m;
}

}  // namespace

TEST_CASE("manifest json lines round trip") {
  Manifest m{rec("a", 1.5, "HI THERE"), rec("b", 2.25)};
  m[1].origin = Origin::kTts;
  std::ostringstream out;
  write_manifest(out, m);
  std::istringstream in(out.str());
  CHECK(parse_manifest(in) == m);
  CHECK(out.str().find("\"origin\":\"tts\"") != std::string::npos);

  std::istringstream lower(R"({"id":"x","audio":"x.wav","duration":1.0,"transcript":"hi there","speaker":"s","origin":"real"})");
  CHECK(parse_manifest(lower).front().transcript == "HI THERE");
}

TEST_CASE("malformed manifests") {
  const std::string good = R"({"id":"x","audio":"x.wav","duration":1.0,"transcript":"A","speaker":"s","origin":"real"})";
  const std::string text = good + "\n{not json}\n" +
                           R"({"id":"y","audio":"y.wav","duration":-1,"transcript":"A","speaker":"s","origin":"real"})" +
                           "\n" + good + "\n";
  std::istringstream strict(text);
  CHECK_THROWS_AS(parse_manifest(strict), Error);
  std::istringstream lenient(text);
  std::vector<ManifestIssue> issues;
  const Manifest m = parse_manifest(lenient, false, &issues);
  CHECK(m.size() == 1);
  REQUIRE(issues.size() == 3);
  CHECK(issues[0].line == 2);
  CHECK(issues[1].line == 3);
  CHECK(issues[2].line == 4);
}

TEST_CASE("duration filter") {
  const Manifest m{rec("a", 0.3), rec("b", 5.0), rec("c", 40.0)};
  const Manifest kept = manifest_filter(m, 0.5, 30.0);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "b");
  CHECK(manifest_filter({}, 0.5, 30.0).empty());
  CHECK_THROWS_AS(manifest_filter(m, 0.0, 30.0), Error);
  CHECK_THROWS_AS(manifest_filter(m, 5.0, 5.0), Error);
}

TEST_CASE("ctc feasibility filter") {
  const std::string text = "ABCDEF GHIJKL";
  const BpeModel chars = bpe_train({text}, 2 + 12);
  REQUIRE(chars.merges().empty());
  REQUIRE(chars.encode(text).size() == 12);
  FeasibilityCheck check;
  check.bpe = &chars;
  check.params = FrameParams::synthesis_default(16000);
  CHECK(check.encoder_frames(1.0) == 20);
  const Manifest m{rec("short", 1.0, text), rec("long", 5.0, text)};
  CHECK(!check.feasible(m[0]));
  CHECK(check.feasible(m[1]));
  const Manifest kept = manifest_filter(m, 0.5, 30.0, &check);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "long");
}

TEST_CASE("speed expansion") {
  const Manifest m = numbered("u", 100);
  const std::vector<double> f{0.9, 1.1};
  const Manifest x = manifest_expand_speed(m, f);
  CHECK(x.size() == 300);
  CHECK(x[0] == m[0]);
  CHECK(x[1].id == "u0-sp0.9");
  CHECK(x[2].id == "u0-sp1.1");
  CHECK(x[1].audio == "audio/u0-sp0.9.wav");
  CHECK(x[1].transcript == m[0].transcript);

  const Manifest ten = manifest_expand_speed({rec("t", 10.0)}, f);
  CHECK(ten[1].duration == doctest::Approx(11.111).epsilon(1e-4));
  CHECK(ten[2].duration == doctest::Approx(10.0 / 1.1));
  CHECK(manifest_expand_speed(m, std::vector<double>{}) == m);
  CHECK(manifest_expand_speed(m, std::vector<double>{1.0}) == m);
  CHECK_THROWS_AS(manifest_expand_speed(m, std::vector<double>{0.9, 0.9}), Error);
  CHECK_THROWS_AS(manifest_expand_speed(m, std::vector<double>{-0.9}), Error);
  const Manifest clash{rec("a", 1.0), rec("a-sp0.9", 1.0)};
  CHECK_THROWS_AS(manifest_expand_speed(clash, f), Error);
}

TEST_CASE("manifest merge") {
  const Manifest core = numbered("core", 100), tts = numbered("tts", 360);
  const Manifest merged = manifest_merge(core, tts, Origin::kTts);
  CHECK(merged.size() == 460);
  CHECK(std::count_if(merged.begin(), merged.end(),
                      [](const auto &r) { return r.origin == Origin::kTts; }) == 360);
  CHECK(std::equal(core.begin(), core.end(), merged.begin()));
  CHECK(manifest_merge(core, {}, Origin::kTts) == core);
  try {
    manifest_merge(core, numbered("core", 1), Origin::kTts);
    FAIL("expected a duplicate id error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("core0") != std::string::npos);
  }
}

TEST_CASE("pseudo labels") {
  const Manifest m = numbered("u", 4);
  TranscriptMap hyps{{"u0", "first hyp"}, {"u2", "THIRD"}, {"ghost", "X"}};
  const PseudoLabelResult r = attach_pseudo_labels(m, hyps);
  REQUIRE(r.manifest.size() == 2);
  CHECK(r.manifest[0].id == "u0");
  CHECK(r.manifest[0].transcript == "FIRST HYP");
  CHECK(r.manifest[1].transcript == "THIRD");
  CHECK(r.dropped == 2);
  CHECK(r.unknown_ids == std::vector<std::string>{"ghost"});
  for (const auto &x : r.manifest) CHECK(x.origin == Origin::kPseudo);
  const PseudoLabelResult none = attach_pseudo_labels(m, {});
  CHECK(none.manifest.empty());
  CHECK(none.dropped == 4);
}

TEST_CASE("config parse and dump") {
  std::istringstream empty("");
  const PipelineConfig d = parse_config(empty);
  CHECK(d.decode.beam_size == 20);
  CHECK(d.bpe_vocab == 5000);
  CHECK(d.speed_factors == std::vector<double>{0.9, 1.1});
  CHECK(d.n_mels == 80);

  std::istringstream in(
      "[decode]\nbeam = 8\nctc_weight = 0.3\n"
      "[augment]\nspeed_factors = 0.8, 1.2\nfill = zero\n"
      "[lm]\nsmoothing = add_k\norder = 3\n");
  const PipelineConfig c = parse_config(in);
  CHECK(c.decode.beam_size == 8);
  CHECK(c.decode.ctc_weight == 0.3);
  CHECK(c.speed_factors == std::vector<double>{0.8, 1.2});
  CHECK(c.specaug.fill == MaskFill::kZero);
  CHECK(c.lm.smoothing == Smoothing::kAddK);
  CHECK(c.lm.order == 3);

  std::istringstream again(dump_config(c));
  CHECK(dump_config(parse_config(again)) == dump_config(c));

  std::istringstream unknown_key("[decode]\nbeams = 3\n");
  CHECK_THROWS_AS(parse_config(unknown_key), Error);
  std::istringstream unknown_section("[vocoder]\norder = 3\n");
  CHECK_THROWS_AS(parse_config(unknown_section), Error);
  std::istringstream bad_value("[decode]\nbeam = many\n");
  CHECK_THROWS_AS(parse_config(bad_value), Error);
  std::istringstream invalid("[filter]\nmin_duration = 40\n");
  CHECK_THROWS_AS(parse_config(invalid), Error);
}

TEST_CASE("parallel for") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
  std::atomic<int> count{0};
  CHECK_THROWS_AS(parallel_for(50,
                               [&](std::size_t i) {
                                 ++count;
                                 if (i == 17) throw Error("boom");
                               }),
                  Error);
  CHECK(worker_count() >= 1);
}
