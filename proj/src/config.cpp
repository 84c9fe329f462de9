// src/config.cpp

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

#include "speechforge/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sforge {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> &known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"audio", {"sample_rate"}},
      {"frontend",
       {"window_ms", "hop_ms", "fft_size", "window", "n_mels", "fmin", "fmax", "log_floor"}},
      {"pitch", {"min_f0", "max_f0", "nccf_threshold", "median_width"}},
      {"augment",
       {"speed_factors", "freq_masks", "max_freq_width", "time_masks", "max_time_width",
        "fill", "seed"}},
      {"filter", {"min_duration", "max_duration", "subsampling"}},
      {"glim", {"iterations", "init", "seed", "nnls_iterations"}},
      {"lpc", {"order", "lag_window_hz", "white_noise_correction"}},
      {"bpe", {"vocab_size"}},
      {"lm", {"order", "smoothing", "k"}},
      {"decode", {"beam", "ctc_weight", "lm_weight", "nbest"}},
  };
  return keys;
}

std::vector<double> parse_list(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    try {
      out.push_back(std::stod(item.substr(b)));
    } catch (const std::exception &) {
      throw Error("config: bad number '" + item + "' in list");
    }
  }
  return out;
}

template <typename T>
void read(const pt::ptree &tree, const std::string &key, T &dst) {
  if (auto v = tree.get_optional<std::string>(key)) {
    try {
      dst = tree.get<T>(key);
    } catch (const pt::ptree_bad_data &) {
      throw Error("config: bad value '" + *v + "' for " + key);
    }
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (sample_rate <= 0) throw Error("config: sample_rate must be positive");
  frame.validate();
  if (n_mels < 1) throw Error("config: n_mels must be >= 1");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0))
    throw Error("config: need 0 <= fmin < fmax <= sample_rate/2");
  if (!(log_floor > 0.0)) throw Error("config: log_floor must be positive");
  pitch.validate(sample_rate, frame);
  for (double f : speed_factors)
    if (!(f > 0.0)) throw Error("config: speed factors must be positive");
  if (specaug.n_freq_masks < 0 || specaug.n_time_masks < 0 || specaug.max_freq_width < 0 ||
      specaug.max_time_width < 0)
    throw Error("config: mask counts and widths must be >= 0");
  if (!(min_duration > 0.0 && min_duration < max_duration))
    throw Error("config: need 0 < min_duration < max_duration");
  if (subsampling < 1) throw Error("config: subsampling must be >= 1");
  if (glim.n_iters < 0) throw Error("config: glim iterations must be >= 0");
  if (nnls_iterations < 1) throw Error("config: nnls_iterations must be >= 1");
  if (lpc.order < 1) throw Error("config: lpc order must be >= 1");
  if (bpe_vocab < 3) throw Error("config: bpe vocab_size too small");
  if (lm.order < 1) throw Error("config: lm order must be >= 1");
  decode.validate();
}

PipelineConfig parse_config(std::istream &in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw Error(std::string("config: ") + e.what());
  }
  const auto &known = known_keys();
  for (const auto &[section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw Error("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty())
      throw Error("config: key '" + section + "' outside a section");
    for (const auto &[key, v] : body)
      if (!it->second.count(key))
        throw Error("config: unknown key " + section + "." + key);
  }

  PipelineConfig c;
  read(tree, "audio.sample_rate", c.sample_rate);
  double window_ms = 1000.0 * static_cast<double>(c.frame.window_len) / c.sample_rate;
  double hop_ms = 1000.0 * static_cast<double>(c.frame.hop_len) / c.sample_rate;
  read(tree, "frontend.window_ms", window_ms);
  read(tree, "frontend.hop_ms", hop_ms);
  c.frame = FrameParams::from_durations(c.sample_rate, window_ms / 1000.0, hop_ms / 1000.0);
  read(tree, "frontend.fft_size", c.frame.fft_size);
  if (auto w = tree.get_optional<std::string>("frontend.window")) {
    if (*w == "hann") c.frame.window_kind = WindowKind::kHann;
    else if (*w == "hamming") c.frame.window_kind = WindowKind::kHamming;
    else throw Error("config: frontend.window must be hann or hamming");
  }
  read(tree, "frontend.n_mels", c.n_mels);
  read(tree, "frontend.fmin", c.fmin);
  c.fmax = c.sample_rate / 2.0;
  read(tree, "frontend.fmax", c.fmax);
  read(tree, "frontend.log_floor", c.log_floor);

  read(tree, "pitch.min_f0", c.pitch.min_f0);
  read(tree, "pitch.max_f0", c.pitch.max_f0);
  read(tree, "pitch.nccf_threshold", c.pitch.nccf_threshold);
  read(tree, "pitch.median_width", c.pitch.median_width);

  if (auto s = tree.get_optional<std::string>("augment.speed_factors"))
    c.speed_factors = parse_list(*s);
  read(tree, "augment.freq_masks", c.specaug.n_freq_masks);
  read(tree, "augment.max_freq_width", c.specaug.max_freq_width);
  read(tree, "augment.time_masks", c.specaug.n_time_masks);
  read(tree, "augment.max_time_width", c.specaug.max_time_width);
  if (auto f = tree.get_optional<std::string>("augment.fill")) {
    if (*f == "mean") c.specaug.fill = MaskFill::kMean;
    else if (*f == "zero") c.specaug.fill = MaskFill::kZero;
    else throw Error("config: augment.fill must be mean or zero");
  }
  read(tree, "augment.seed", c.specaug.seed);

  read(tree, "filter.min_duration", c.min_duration);
  read(tree, "filter.max_duration", c.max_duration);
  read(tree, "filter.subsampling", c.subsampling);

  read(tree, "glim.iterations", c.glim.n_iters);
  if (auto i = tree.get_optional<std::string>("glim.init")) {
    if (*i == "zero") c.glim.init = PhaseInit::kZero;
    else if (*i == "random") c.glim.init = PhaseInit::kRandom;
    else throw Error("config: glim.init must be zero or random");
  }
  read(tree, "glim.seed", c.glim.seed);
  read(tree, "glim.nnls_iterations", c.nnls_iterations);
  c.lpc.nnls_iterations = c.nnls_iterations;

  read(tree, "lpc.order", c.lpc.order);
  read(tree, "lpc.lag_window_hz", c.lpc.lag_window_hz);
  read(tree, "lpc.white_noise_correction", c.lpc.white_noise_correction);

  read(tree, "bpe.vocab_size", c.bpe_vocab);
  read(tree, "lm.order", c.lm.order);
  if (auto s = tree.get_optional<std::string>("lm.smoothing"))
    c.lm.smoothing = parse_smoothing(*s);
  read(tree, "lm.k", c.lm.k);

  read(tree, "decode.beam", c.decode.beam_size);
  read(tree, "decode.ctc_weight", c.decode.ctc_weight);
  read(tree, "decode.lm_weight", c.decode.lm_weight);
  read(tree, "decode.nbest", c.nbest);

  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  return parse_config(in);
}

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

}  // namespace

std::string dump_config(const PipelineConfig &c) {
  std::ostringstream o;
  o << "[audio]\nsample_rate = " << c.sample_rate << "\n\n";
  o << "[frontend]\nwindow_ms = " << num(1000.0 * c.frame.window_len / c.sample_rate)
    << "\nhop_ms = " << num(1000.0 * c.frame.hop_len / c.sample_rate)
    << "\nfft_size = " << c.frame.fft_size
    << "\nwindow = " << (c.frame.window_kind == WindowKind::kHann ? "hann" : "hamming")
    << "\nn_mels = " << c.n_mels << "\nfmin = " << num(c.fmin) << "\nfmax = " << num(c.fmax)
    << "\nlog_floor = " << num(c.log_floor) << "\n\n";
  o << "[pitch]\nmin_f0 = " << num(c.pitch.min_f0) << "\nmax_f0 = " << num(c.pitch.max_f0)
    << "\nnccf_threshold = " << num(c.pitch.nccf_threshold)
    << "\nmedian_width = " << c.pitch.median_width << "\n\n";
  o << "[augment]\nspeed_factors = ";
  for (std::size_t i = 0; i < c.speed_factors.size(); ++i)
    o << (i ? "," : "") << num(c.speed_factors[i]);
  o << "\nfreq_masks = " << c.specaug.n_freq_masks
    << "\nmax_freq_width = " << c.specaug.max_freq_width
    << "\ntime_masks = " << c.specaug.n_time_masks
    << "\nmax_time_width = " << c.specaug.max_time_width
    << "\nfill = " << (c.specaug.fill == MaskFill::kMean ? "mean" : "zero")
    << "\nseed = " << c.specaug.seed << "\n\n";
  o << "[filter]\nmin_duration = " << num(c.min_duration) << "\nmax_duration = " << num(c.max_duration)
    << "\nsubsampling = " << c.subsampling << "\n\n";
  o << "[glim]\niterations = " << c.glim.n_iters
    << "\ninit = " << (c.glim.init == PhaseInit::kZero ? "zero" : "random")
    << "\nseed = " << c.glim.seed << "\nnnls_iterations = " << c.nnls_iterations << "\n\n";
  o << "[lpc]\norder = " << c.lpc.order << "\nlag_window_hz = " << num(c.lpc.lag_window_hz)
    << "\nwhite_noise_correction = " << num(c.lpc.white_noise_correction) << "\n\n";
  o << "[bpe]\nvocab_size = " << c.bpe_vocab << "\n\n";
  o << "[lm]\norder = " << c.lm.order << "\nsmoothing = " << smoothing_name(c.lm.smoothing)
    << "\nk = " << num(c.lm.k) << "\n\n";
  o << "[decode]\nbeam = " << c.decode.beam_size << "\nctc_weight = " << num(c.decode.ctc_weight)
    << "\nlm_weight = " << num(c.decode.lm_weight) << "\nnbest = " << c.nbest << "\n";
  return o.str();
}

}  // namespace sforge
