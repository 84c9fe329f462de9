// src/manifest.cpp

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

#include "speechforge/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "speechforge/lexicon.hpp"

namespace sforge {

using Json = nlohmann::ordered_json;

Origin parse_origin(std::string_view s) {
  if (s == "real") return Origin::kReal;
  if (s == "tts") return Origin::kTts;
  if (s == "pseudo") return Origin::kPseudo;
  throw Error("unknown origin '" + std::string(s) + "' (real | tts | pseudo)");
}

std::string_view origin_name(Origin o) {
  switch (o) {
    case Origin::kReal: return "real";
    case Origin::kTts: return "tts";
    case Origin::kPseudo: return "pseudo";
  }
  return "real";
}

namespace {

UtteranceRecord record_from_json(const Json &j) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  auto text = [&](const char *key) -> std::string {
    if (!j.contains(key)) throw Error(std::string("missing field '") + key + "'");
    if (!j[key].is_string()) throw Error(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  UtteranceRecord r;
  r.id = text("id");
  if (r.id.empty()) throw Error("empty id");
  r.audio = text("audio");
  if (!j.contains("duration") || !j["duration"].is_number())
    throw Error("field 'duration' must be a number");
  r.duration = j["duration"].get<double>();
  if (!(r.duration > 0.0) || !std::isfinite(r.duration))
    throw Error("duration must be positive");
  r.transcript = to_upper(text("transcript"));
  r.speaker = text("speaker");
  r.origin = parse_origin(text("origin"));
  return r;
}

}  // namespace

std::string record_to_json(const UtteranceRecord &r) {
  Json j;
  j["id"] = r.id;
  j["audio"] = r.audio;
  j["duration"] = r.duration;
  j["transcript"] = r.transcript;
  j["speaker"] = r.speaker;
  j["origin"] = std::string(origin_name(r.origin));
  return j.dump();
}

Manifest parse_manifest(std::istream &in, bool strict, std::vector<ManifestIssue> *issues) {
  Manifest m;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error &e) {
        throw Error("invalid JSON");
      }
      UtteranceRecord r = record_from_json(j);
      if (!ids.insert(r.id).second) throw Error("duplicate id " + r.id);
      m.push_back(std::move(r));
    } catch (const Error &e) {
      if (strict)
        throw Error("manifest line " + std::to_string(lineno) + ": " + e.what());
      if (issues) issues->push_back({lineno, e.what()});
    }
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path &path, bool strict,
                       std::vector<ManifestIssue> *issues) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  return parse_manifest(in, strict, issues);
}

void write_manifest(std::ostream &out, const Manifest &m) {
  for (const auto &r : m) out << record_to_json(r) << '\n';
}

void write_manifest(const std::filesystem::path &path, const Manifest &m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_manifest(out, m);
}

void validate_manifest(const Manifest &m) {
  std::unordered_set<std::string> ids;
  for (const auto &r : m) {
    if (!ids.insert(r.id).second) throw Error("manifest: duplicate id " + r.id);
    if (!(r.duration > 0.0)) throw Error("manifest: non-positive duration for " + r.id);
  }
}

Index FeasibilityCheck::encoder_frames(double duration) const {
  const auto samples = static_cast<Index>(std::llround(duration * sample_rate));
  return num_frames(samples, params) / subsampling;
}

bool FeasibilityCheck::feasible(const UtteranceRecord &r) const {
  if (!bpe) return true;
  const auto tokens = static_cast<Index>(bpe->encode(r.transcript).size());
  return 2 * tokens + 1 <= encoder_frames(r.duration);
}

Manifest manifest_filter(const Manifest &m, double min_dur, double max_dur,
                         const FeasibilityCheck *check) {
  if (!(min_dur > 0.0 && min_dur < max_dur))
    throw Error("manifest_filter: need 0 < min_dur < max_dur");
  if (check && check->subsampling < 1)
    throw Error("manifest_filter: subsampling must be >= 1");
  Manifest out;
  for (const auto &r : m) {
    if (r.duration < min_dur || r.duration > max_dur) continue;
    if (check && !check->feasible(r)) continue;
    out.push_back(r);
  }
  return out;
}

std::string speed_suffix(double factor) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), factor);
  return "-sp" + std::string(buf, res.ptr);
}

std::string speed_audio_path(std::string_view audio, double factor) {
  const std::string a(audio);
  const auto slash = a.find_last_of('/');
  const auto dot = a.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  if (!has_ext) return a + speed_suffix(factor);
  return a.substr(0, dot) + speed_suffix(factor) + a.substr(dot);
}

Manifest manifest_expand_speed(const Manifest &m, std::span<const double> factors) {
  std::vector<double> used;
  for (double f : factors) {
    if (!(f > 0.0) || !std::isfinite(f))
      throw Error("manifest_expand_speed: factor must be positive");
    if (std::find(used.begin(), used.end(), f) != used.end())
      throw Error("manifest_expand_speed: duplicate factor " + speed_suffix(f).substr(3));
    used.push_back(f);
  }
  used.erase(std::remove(used.begin(), used.end(), 1.0), used.end());

  std::unordered_set<std::string> ids;
  for (const auto &r : m) ids.insert(r.id);
  Manifest out;
  out.reserve(m.size() * (used.size() + 1));
  for (const auto &r : m) {
    out.push_back(r);
    for (double f : used) {
      UtteranceRecord p = r;
      p.id = r.id + speed_suffix(f);
      if (!ids.insert(p.id).second)
        throw Error("manifest_expand_speed: id collision on " + p.id);
      p.audio = speed_audio_path(r.audio, f);
      p.duration = r.duration / f;
      out.push_back(std::move(p));
    }
  }
  return out;
}

Manifest manifest_merge(const Manifest &core, const Manifest &additional, Origin origin_tag) {
  std::unordered_set<std::string> ids;
  Manifest out;
  out.reserve(core.size() + additional.size());
  for (const auto &r : core) {
    if (!ids.insert(r.id).second) throw Error("manifest_merge: duplicate id " + r.id);
    out.push_back(r);
  }
  for (const auto &r : additional) {
    if (!ids.insert(r.id).second) throw Error("manifest_merge: duplicate id " + r.id);
    out.push_back(r);
    out.back().origin = origin_tag;
  }
  return out;
}

PseudoLabelResult attach_pseudo_labels(const Manifest &m, const TranscriptMap &hyps) {
  PseudoLabelResult res;
  std::set<std::string> matched;
  for (const auto &r : m) {
    auto it = hyps.find(r.id);
    if (it == hyps.end()) {
      ++res.dropped;
      continue;
    }
    matched.insert(r.id);
    UtteranceRecord p = r;
    p.transcript = to_upper(it->second);
    p.origin = Origin::kPseudo;
    res.manifest.push_back(std::move(p));
  }
  for (const auto &[id, text] : hyps)
    if (!matched.count(id)) res.unknown_ids.push_back(id);
  return res;
}

}  // namespace sforge
