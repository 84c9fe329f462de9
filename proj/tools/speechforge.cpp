// tools/speechforge.cpp

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

// speechforge command-line driver. Exit codes: 0 ok, 1 usage, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "speechforge/augment.hpp"
#include "speechforge/bpe.hpp"
#include "speechforge/config.hpp"
#include "speechforge/ctc.hpp"
#include "speechforge/features.hpp"
#include "speechforge/griffin_lim.hpp"
#include "speechforge/io.hpp"
#include "speechforge/lpc.hpp"
#include "speechforge/manifest.hpp"
#include "speechforge/mel.hpp"
#include "speechforge/ngram.hpp"
#include "speechforge/parallel.hpp"
#include "speechforge/ttsloss.hpp"
#include "speechforge/wer.hpp"

namespace fs = std::filesystem;
using namespace sforge;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    lines.push_back(l);
  }
  return lines;
}

// Reads a file, or stdin for "-".
std::vector<std::string> read_input_lines(const std::string &path) {
  if (path != "-") return read_lines(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(std::cin, l);) lines.push_back(l);
  return lines;
}

class Output {
 public:
  explicit Output(const std::string &path) {
    if (path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot write " + path);
    }
  }
  std::ostream &stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> parse_factor_list(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception &) {
      throw UsageError("bad factor '" + item + "'");
    }
  }
  return out;
}

MelFilterbank filterbank_for(const PipelineConfig &c) {
  return mel_filterbank(c.n_mels, c.frame, c.sample_rate, c.fmin, c.fmax);
}

Waveform load_audio(const std::string &path, const PipelineConfig &c) {
  Waveform w = read_wav(path);
  if (w.sample_rate != c.sample_rate)
    throw Error(path + ": sample rate " + std::to_string(w.sample_rate) +
                " differs from configured " + std::to_string(c.sample_rate));
  return w;
}

DiagGaussian gaussian_from_json(const nlohmann::json &j) {
  auto vec = [](const nlohmann::json &a, const char *what) {
    if (!a.is_array()) throw Error(std::string("'") + what + "' must be an array");
    Vector v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
    return v;
  };
  if (!j.contains("mean") || !j.contains("log_var"))
    throw Error("gaussian needs 'mean' and 'log_var'");
  DiagGaussian g{vec(j["mean"], "mean"), vec(j["log_var"], "log_var")};
  g.validate();
  return g;
}

nlohmann::json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw Error(path + ": " + e.what());
  }
}

std::vector<std::string> read_vocab(const std::string &path) {
  std::vector<std::string> v;
  for (const std::string &l : read_lines(path)) {
    std::istringstream ss(l);
    std::string tok;
    if (ss >> tok) v.push_back(tok);
  }
  if (v.size() < 2) throw Error(path + ": vocabulary needs blank plus at least one token");
  return v;
}

// Posteriorgram rows are stored as f32; renormalize to undo rounding.
PosteriorGram load_posteriors(const std::string &path) {
  PosteriorGram pg{read_fmx(path)};
  if (pg.log_probs.rows() < 1 || pg.log_probs.cols() < 2)
    throw Error(path + ": posteriorgram needs frames and at least two classes");
  pg.validate(1e-4);
  pg.log_probs = log_softmax(pg.log_probs);
  return pg;
}

std::string join_pieces(const std::vector<int> &ids, const std::vector<std::string> &vocab) {
  std::vector<std::string> pieces;
  for (int id : ids) pieces.push_back(vocab.at(static_cast<std::size_t>(id)));
  const bool marked = std::any_of(pieces.begin(), pieces.end(), [](const std::string &p) {
    return p.rfind(std::string(kWordBoundary), 0) == 0;
  });
  if (marked) return detokenize(pieces);
  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) out += (i ? " " : "") + pieces[i];
  return out;
}

TableScorer load_table_scorer(const std::string &path) {
  // Lines: "prev token score" (prev -1 = start) or "final last score".
  TableScorer t;
  std::size_t lineno = 0;
  for (const std::string &l : read_lines(path)) {
    ++lineno;
    std::istringstream ss(l);
    std::string a;
    if (!(ss >> a) || a[0] == '#') continue;
    double score = 0.0;
    if (a == "final") {
      int last = 0;
      if (!(ss >> last >> score)) throw Error(path + ":" + std::to_string(lineno) + ": bad row");
      t.set_final(last, score);
    } else {
      int token = 0;
      if (!(ss >> token >> score)) throw Error(path + ":" + std::to_string(lineno) + ": bad row");
      t.set_step(std::stoi(a), token, score);
    }
  }
  return t;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"speechforge: speech front-end, inversion, decoding and scoring tools"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "INI configuration file");

  PipelineConfig cfg;
  auto load_cfg = [&] {
    cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
  };

  // config
  auto *config_cmd = app.add_subcommand("config", "Print the effective configuration");

  // featex
  auto *featex = app.add_subcommand("featex", "fbank+pitch features per manifest record");
  std::string fx_manifest, fx_wav, fx_out, fx_cmvn = "per-utt";
  featex->add_option("--manifest", fx_manifest, "JSON-lines manifest");
  featex->add_option("--wav", fx_wav, "single WAV input (with --out FILE)");
  featex->add_option("--out", fx_out, "output directory (manifest) or file (wav)")->required();
  featex->add_option("--cmvn", fx_cmvn, "per-utt | none")
      ->check(CLI::IsMember({"per-utt", "none"}));

  // augment
  auto *augment = app.add_subcommand("augment", "Speed perturbation and SpecAugment");
  augment->require_subcommand(1);
  auto *aug_speed = augment->add_subcommand("speed", "Resampling speed change of a WAV");
  std::string sp_in, sp_out;
  double sp_factor = 1.0;
  aug_speed->add_option("--in", sp_in)->required();
  aug_speed->add_option("--out", sp_out)->required();
  aug_speed->add_option("--factor", sp_factor)->required();
  auto *aug_spec = augment->add_subcommand("specaug", "Mask an FMX1 feature matrix");
  std::string sa_in, sa_out, sa_fill;
  std::optional<std::uint64_t> sa_seed;
  std::optional<int> sa_fm, sa_tm;
  std::optional<Index> sa_fw, sa_tw;
  aug_spec->add_option("--in", sa_in)->required();
  aug_spec->add_option("--out", sa_out)->required();
  aug_spec->add_option("--seed", sa_seed);
  aug_spec->add_option("--freq-masks", sa_fm);
  aug_spec->add_option("--freq-width", sa_fw);
  aug_spec->add_option("--time-masks", sa_tm);
  aug_spec->add_option("--time-width", sa_tw);
  aug_spec->add_option("--fill", sa_fill)->check(CLI::IsMember({"mean", "zero"}));

  // glim
  auto *glim = app.add_subcommand("glim", "Griffin-Lim inversion to WAV");
  std::string gl_mel, gl_out, gl_init, gl_errors;
  std::optional<int> gl_iters;
  std::optional<std::uint64_t> gl_seed;
  bool gl_linear = false;
  glim->add_option("--mel", gl_mel, "FMX1 log-Mel (or linear magnitude)")->required();
  glim->add_option("--out", gl_out)->required();
  glim->add_option("--iters", gl_iters);
  glim->add_flag("--from-linear", gl_linear, "input is a linear magnitude spectrogram");
  glim->add_option("--init", gl_init)->check(CLI::IsMember({"zero", "random"}));
  glim->add_option("--seed", gl_seed);
  glim->add_option("--errors", gl_errors, "write per-iteration errors here");

  // lpcprep
  auto *lpcprep = app.add_subcommand("lpcprep", "Vocoder training data preparation");
  std::string lp_manifest, lp_out;
  lpcprep->add_option("--manifest", lp_manifest)->required();
  lpcprep->add_option("--out", lp_out)->required();

  // bpe
  auto *bpe = app.add_subcommand("bpe", "Byte-pair-encoding subwords");
  bpe->require_subcommand(1);
  auto *bpe_train_cmd = bpe->add_subcommand("train");
  std::string bt_corpus, bt_out;
  std::optional<int> bt_vocab;
  bpe_train_cmd->add_option("--corpus", bt_corpus)->required();
  bpe_train_cmd->add_option("--vocab-size", bt_vocab);
  bpe_train_cmd->add_option("--out", bt_out)->required();
  auto *bpe_encode_cmd = bpe->add_subcommand("encode");
  std::string be_model, be_in = "-", be_out = "-";
  bool be_pieces = false;
  bpe_encode_cmd->add_option("--model", be_model)->required();
  bpe_encode_cmd->add_option("--in", be_in);
  bpe_encode_cmd->add_option("--out", be_out);
  bpe_encode_cmd->add_flag("--pieces", be_pieces, "emit token strings instead of ids");
  auto *bpe_decode_cmd = bpe->add_subcommand("decode");
  std::string bd_model, bd_in = "-", bd_out = "-";
  bpe_decode_cmd->add_option("--model", bd_model)->required();
  bpe_decode_cmd->add_option("--in", bd_in);
  bpe_decode_cmd->add_option("--out", bd_out);
  auto *bpe_vocab_cmd = bpe->add_subcommand("vocab", "List tokens, one per line by id");
  std::string bv_model, bv_out = "-";
  bpe_vocab_cmd->add_option("--model", bv_model)->required();
  bpe_vocab_cmd->add_option("--out", bv_out);

  // lm
  auto *lm = app.add_subcommand("lm", "Backoff n-gram language model");
  lm->require_subcommand(1);
  auto *lm_train_cmd = lm->add_subcommand("train");
  std::string lt_corpus, lt_out, lt_smoothing;
  std::optional<int> lt_order;
  std::optional<double> lt_k;
  lm_train_cmd->add_option("--corpus", lt_corpus)->required();
  lm_train_cmd->add_option("--out", lt_out)->required();
  lm_train_cmd->add_option("--order", lt_order);
  lm_train_cmd->add_option("--smoothing", lt_smoothing)
      ->check(CLI::IsMember({"add_k", "witten_bell"}));
  lm_train_cmd->add_option("--k", lt_k);
  auto *lm_score_cmd = lm->add_subcommand("score");
  std::string ls_lm, ls_in = "-";
  lm_score_cmd->add_option("--lm", ls_lm)->required();
  lm_score_cmd->add_option("--in", ls_in);

  // decode
  auto *decode = app.add_subcommand("decode", "CTC prefix beam search with fusion");
  std::string dc_post, dc_list, dc_vocab, dc_lm, dc_aux, dc_out = "-";
  std::optional<int> dc_beam;
  std::optional<double> dc_ctc_w, dc_lm_w;
  std::optional<std::size_t> dc_nbest;
  decode->add_option("--post", dc_post, "FMX1 log posteriors, T x V");
  decode->add_option("--post-list", dc_list, "lines 'UTTID path.fmx'; writes 'UTTID text'");
  decode->add_option("--vocab", dc_vocab, "token per line, blank first")->required();
  decode->add_option("--beam", dc_beam);
  decode->add_option("--ctc-weight", dc_ctc_w);
  decode->add_option("--lm", dc_lm);
  decode->add_option("--lm-weight", dc_lm_w);
  decode->add_option("--aux-table", dc_aux, "table-driven auxiliary scorer");
  decode->add_option("--nbest", dc_nbest);
  decode->add_option("--out", dc_out);

  // score
  auto *score = app.add_subcommand("score", "WER and relative improvement");
  score->require_subcommand(1);
  auto *score_wer = score->add_subcommand("wer");
  std::string sw_ref, sw_hyp;
  bool sw_per_utt = false;
  score_wer->add_option("--ref", sw_ref)->required();
  score_wer->add_option("--hyp", sw_hyp)->required();
  score_wer->add_flag("--per-utt", sw_per_utt);
  auto *score_impr = score->add_subcommand("impr");
  double si_base = 0.0, si_sys = 0.0;
  score_impr->add_option("--baseline", si_base)->required();
  score_impr->add_option("--system", si_sys)->required();

  // manifest
  auto *manifest = app.add_subcommand("manifest", "Manifest construction");
  manifest->require_subcommand(1);
  bool mf_lenient = false;
  manifest->add_flag("--no-strict", mf_lenient, "skip malformed lines with a warning");
  auto *mf_filter = manifest->add_subcommand("filter");
  std::string mff_in, mff_out, mff_bpe;
  std::optional<double> mff_min, mff_max;
  mf_filter->add_option("--in", mff_in)->required();
  mf_filter->add_option("--out", mff_out)->required();
  mf_filter->add_option("--min", mff_min);
  mf_filter->add_option("--max", mff_max);
  mf_filter->add_option("--bpe", mff_bpe, "enable the CTC length check with this model");
  auto *mf_expand = manifest->add_subcommand("expand");
  std::string mfe_in, mfe_out, mfe_factors;
  mf_expand->add_option("--in", mfe_in)->required();
  mf_expand->add_option("--out", mfe_out)->required();
  mf_expand->add_option("--factors", mfe_factors, "comma list, e.g. 0.9,1.1");
  auto *mf_merge = manifest->add_subcommand("merge");
  std::string mfm_core, mfm_add, mfm_out, mfm_tag = "tts";
  mf_merge->add_option("--core", mfm_core)->required();
  mf_merge->add_option("--additional", mfm_add)->required();
  mf_merge->add_option("--tag", mfm_tag)->check(CLI::IsMember({"real", "tts", "pseudo"}));
  mf_merge->add_option("--out", mfm_out)->required();
  auto *mf_pseudo = manifest->add_subcommand("pseudo");
  std::string mfp_in, mfp_hyp, mfp_out;
  mf_pseudo->add_option("--in", mfp_in)->required();
  mf_pseudo->add_option("--hyp", mfp_hyp)->required();
  mf_pseudo->add_option("--out", mfp_out)->required();

  // ttsloss
  auto *ttsloss = app.add_subcommand("ttsloss", "Synthesizer loss terms");
  std::string tl_pred, tl_target;
  ttsloss->add_option("--pred", tl_pred);
  ttsloss->add_option("--target", tl_target);
  auto *tl_kl = ttsloss->add_subcommand("kl", "Monte Carlo KL to a mixture prior");
  std::string tk_q, tk_prior;
  Index tk_samples = 10000;
  std::uint64_t tk_seed = 0;
  tl_kl->add_option("--q", tk_q, "posterior JSON {mean, log_var}")->required();
  tl_kl->add_option("--prior", tk_prior, "mixture JSON, or 'default'")->required();
  tl_kl->add_option("--samples", tk_samples);
  tl_kl->add_option("--seed", tk_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    load_cfg();

    if (config_cmd->parsed()) {
      std::cout << dump_config(cfg);
      return 0;
    }

    if (featex->parsed()) {
      if (fx_manifest.empty() == fx_wav.empty())
        throw UsageError("featex needs exactly one of --manifest or --wav");
      const MelFilterbank fb = filterbank_for(cfg);
      auto extract = [&](const std::string &audio) {
        FeatureMatrix f = fbank_pitch(load_audio(audio, cfg), cfg.frame, fb, cfg.pitch,
                                      cfg.log_floor);
        if (fx_cmvn == "per-utt") f = cmvn(f, CmvnScope::kPerUtterance);
        return f;
      };
      if (!fx_wav.empty()) {
        write_fmx(fx_out, extract(fx_wav).values);
        return 0;
      }
      const Manifest m = read_manifest(fx_manifest);
      fs::create_directories(fx_out);
      parallel_for(m.size(), [&](std::size_t i) {
        write_fmx(fs::path(fx_out) / (m[i].id + ".fmx"), extract(m[i].audio).values);
      });
      return 0;
    }

    if (aug_speed->parsed()) {
      if (!(sp_factor > 0.0)) throw UsageError("--factor must be positive");
      write_wav(sp_out, speed_perturb(read_wav(sp_in), sp_factor));
      return 0;
    }

    if (aug_spec->parsed()) {
      SpecAugmentConfig sc = cfg.specaug;
      if (sa_seed) sc.seed = *sa_seed;
      if (sa_fm) sc.n_freq_masks = *sa_fm;
      if (sa_fw) sc.max_freq_width = *sa_fw;
      if (sa_tm) sc.n_time_masks = *sa_tm;
      if (sa_tw) sc.max_time_width = *sa_tw;
      if (!sa_fill.empty()) sc.fill = sa_fill == "mean" ? MaskFill::kMean : MaskFill::kZero;
      FeatureMatrix f;
      f.values = read_fmx(sa_in);
      write_fmx(sa_out, spec_augment(f, sc).values);
      return 0;
    }

    if (glim->parsed()) {
      GriffinLimConfig gc = cfg.glim;
      if (gl_iters) gc.n_iters = *gl_iters;
      if (gl_seed) gc.seed = *gl_seed;
      if (!gl_init.empty()) gc.init = gl_init == "zero" ? PhaseInit::kZero : PhaseInit::kRandom;
      const Matrix in = read_fmx(gl_mel);
      Matrix mag;
      if (gl_linear) {
        mag = in;
      } else {
        const MelFilterbank fb = filterbank_for(cfg);
        MelSpectrogram m{in, cfg.frame, cfg.sample_rate, cfg.log_floor};
        mag = mel_to_linear(m, fb, cfg.nnls_iterations);
      }
      const GriffinLimResult r = griffin_lim(mag, cfg.frame, cfg.sample_rate, gc);
      write_wav(gl_out, r.wav);
      if (!gl_errors.empty()) {
        Output o(gl_errors);
        o.stream().precision(17);
        for (std::size_t i = 0; i < r.errors.size(); ++i)
          o.stream() << i << ' ' << r.errors[i] << '\n';
      }
      return 0;
    }

    if (lpcprep->parsed()) {
      const Manifest m = read_manifest(lp_manifest);
      const MelFilterbank fb = filterbank_for(cfg);
      fs::create_directories(lp_out);
      parallel_for(m.size(), [&](std::size_t i) {
        const Waveform w = load_audio(m[i].audio, cfg);
        const MelSpectrogram mel = mel_spectrogram(w, cfg.frame, fb, cfg.log_floor);
        const auto seqs = chunk_training_sequences(w, mel, fb, cfg.lpc);
        const fs::path base = fs::path(lp_out) / m[i].id;
        Matrix feats(0, mel.num_mels());
        std::vector<std::uint8_t> exc;
        std::ofstream side(base.string() + ".lpc.txt", std::ios::trunc);
        if (!side) throw Error("cannot write " + base.string() + ".lpc.txt");
        side.precision(17);
        for (const auto &s : seqs) {
          const Index r0 = feats.rows();
          feats.conservativeResize(r0 + s.features.rows(), Eigen::NoChange);
          feats.bottomRows(s.features.rows()) = s.features;
          exc.insert(exc.end(), s.excitation.begin(), s.excitation.end());
          for (const auto &f : s.lpc) side << f.pred_error << ' ' << f.flatness << '\n';
        }
        write_fmx(base.string() + ".fmx", feats);
        write_file_bytes(base.string() + ".exc", exc);
      });
      return 0;
    }

    if (bpe_train_cmd->parsed()) {
      const BpeModel model = bpe_train(read_lines(bt_corpus), bt_vocab.value_or(cfg.bpe_vocab));
      model.save(fs::path(bt_out));
      return 0;
    }
    if (bpe_encode_cmd->parsed()) {
      const BpeModel model = BpeModel::load(fs::path(be_model));
      Output o(be_out);
      for (const std::string &line : read_input_lines(be_in)) {
        if (be_pieces) {
          const auto p = model.encode_pieces(line);
          for (std::size_t i = 0; i < p.size(); ++i) o.stream() << (i ? " " : "") << p[i];
        } else {
          const auto ids = model.encode(line);
          for (std::size_t i = 0; i < ids.size(); ++i) o.stream() << (i ? " " : "") << ids[i];
        }
        o.stream() << '\n';
      }
      return 0;
    }
    if (bpe_decode_cmd->parsed()) {
      const BpeModel model = BpeModel::load(fs::path(bd_model));
      Output o(bd_out);
      for (const std::string &line : read_input_lines(bd_in)) {
        std::vector<int> ids;
        std::istringstream ss(line);
        for (std::string t; ss >> t;) {
          try {
            ids.push_back(std::stoi(t));
          } catch (const std::exception &) {
            throw Error("bpe decode: '" + t + "' is not a token id");
          }
        }
        o.stream() << model.decode(ids) << '\n';
      }
      return 0;
    }
    if (bpe_vocab_cmd->parsed()) {
      const BpeModel model = BpeModel::load(fs::path(bv_model));
      Output o(bv_out);
      for (const auto &t : model.tokens()) o.stream() << t << '\n';
      return 0;
    }

    if (lm_train_cmd->parsed()) {
      NGramTrainOptions opts = cfg.lm;
      if (lt_order) opts.order = *lt_order;
      if (!lt_smoothing.empty()) opts.smoothing = parse_smoothing(lt_smoothing);
      if (lt_k) opts.k = *lt_k;
      if (opts.order < 1) throw UsageError("--order must be >= 1");
      ngram_train(read_lines(lt_corpus), opts).save(fs::path(lt_out));
      return 0;
    }
    if (lm_score_cmd->parsed()) {
      const NGramModel model = NGramModel::load(fs::path(ls_lm));
      double total = 0.0;
      long tokens = 0;
      std::cout.precision(10);
      for (const std::string &line : read_input_lines(ls_in)) {
        const auto toks = split_tokens(line);
        const double lp = model.sentence_logprob(toks);
        total += lp;
        tokens += static_cast<long>(toks.size()) + 1;
        std::cout << lp << '\n';
      }
      std::cout << "total " << total << " tokens " << tokens;
      if (tokens > 0) std::cout << " ppl " << std::exp(-total / static_cast<double>(tokens));
      std::cout << '\n';
      return 0;
    }

    if (decode->parsed()) {
      if (dc_post.empty() == dc_list.empty())
        throw UsageError("decode needs exactly one of --post or --post-list");
      FusionWeights fw = cfg.decode;
      if (dc_beam) fw.beam_size = *dc_beam;
      if (dc_ctc_w) fw.ctc_weight = *dc_ctc_w;
      if (dc_lm_w) fw.lm_weight = *dc_lm_w;
      const std::size_t nbest = dc_nbest.value_or(cfg.nbest);
      fw.validate();
      const std::vector<std::string> vocab = read_vocab(dc_vocab);
      std::optional<NGramModel> lm_model;
      std::optional<NGramScorer> lm_scorer;
      if (!dc_lm.empty()) {
        lm_model = NGramModel::load(fs::path(dc_lm));
        lm_scorer.emplace(*lm_model, vocab);
      }
      std::optional<TableScorer> aux;
      if (!dc_aux.empty()) aux = load_table_scorer(dc_aux);
      auto run = [&](const PosteriorGram &pg) {
        if (pg.vocab_size() != static_cast<Index>(vocab.size()))
          throw Error("posteriorgram has " + std::to_string(pg.vocab_size()) +
                      " classes, vocabulary has " + std::to_string(vocab.size()));
        return ctc_prefix_beam(pg, fw, lm_scorer ? &*lm_scorer : nullptr,
                               aux ? &*aux : nullptr, nbest);
      };
      Output o(dc_out);
      o.stream().precision(10);
      if (!dc_post.empty()) {
        const auto hyps = run(load_posteriors(dc_post));
        for (std::size_t i = 0; i < hyps.size(); ++i)
          o.stream() << i + 1 << '\t' << hyps[i].score_total << '\t' << hyps[i].score_ctc
                     << '\t' << hyps[i].score_aux << '\t' << hyps[i].score_lm << '\t'
                     << join_pieces(hyps[i].tokens, vocab) << '\n';
        return 0;
      }
      std::vector<std::pair<std::string, std::string>> jobs;
      for (const std::string &l : read_lines(dc_list)) {
        std::istringstream ss(l);
        std::string id, path;
        if (!(ss >> id)) continue;
        if (!(ss >> path)) throw Error(dc_list + ": missing path for " + id);
        jobs.emplace_back(id, path);
      }
      std::vector<std::string> text(jobs.size());
      parallel_for(jobs.size(), [&](std::size_t i) {
        const auto hyps = run(load_posteriors(jobs[i].second));
        text[i] = hyps.empty() ? "" : join_pieces(hyps.front().tokens, vocab);
      });
      for (std::size_t i = 0; i < jobs.size(); ++i)
        o.stream() << jobs[i].first << (text[i].empty() ? "" : " ") << text[i] << '\n';
      return 0;
    }

    if (score_wer->parsed()) {
      std::map<std::string, WerBreakdown> per;
      const WerBreakdown w = corpus_wer(read_transcripts(sw_ref), read_transcripts(sw_hyp),
                                        sw_per_utt ? &per : nullptr);
      for (const auto &[id, b] : per) std::cout << id << ' ' << format_wer_report(b) << '\n';
      std::cout << format_wer_report(w) << '\n';
      return 0;
    }
    if (score_impr->parsed()) {
      std::cout << format_percent(relative_improvement(si_base, si_sys)) << '\n';
      return 0;
    }

    if (manifest->parsed()) {
      std::vector<ManifestIssue> issues;
      auto load = [&](const std::string &p) {
        Manifest m = read_manifest(p, !mf_lenient, &issues);
        for (const auto &is : issues)
          std::cerr << "warning: " << p << ':' << is.line << ": " << is.message << '\n';
        issues.clear();
        return m;
      };
      if (mf_filter->parsed()) {
        std::optional<BpeModel> model;
        FeasibilityCheck check;
        if (!mff_bpe.empty()) {
          model = BpeModel::load(fs::path(mff_bpe));
          check.bpe = &*model;
          check.params = cfg.frame;
          check.sample_rate = cfg.sample_rate;
          check.subsampling = cfg.subsampling;
        }
        const double lo = mff_min.value_or(cfg.min_duration);
        const double hi = mff_max.value_or(cfg.max_duration);
        if (!(lo > 0.0 && lo < hi)) throw UsageError("need 0 < --min < --max");
        write_manifest(fs::path(mff_out),
                       manifest_filter(load(mff_in), lo, hi, model ? &check : nullptr));
        return 0;
      }
      if (mf_expand->parsed()) {
        const std::vector<double> factors =
            mf_expand->count("--factors") ? parse_factor_list(mfe_factors) : cfg.speed_factors;
        write_manifest(fs::path(mfe_out), manifest_expand_speed(load(mfe_in), factors));
        return 0;
      }
      if (mf_merge->parsed()) {
        write_manifest(fs::path(mfm_out),
                       manifest_merge(load(mfm_core), load(mfm_add), parse_origin(mfm_tag)));
        return 0;
      }
      if (mf_pseudo->parsed()) {
        const auto r = attach_pseudo_labels(load(mfp_in), read_transcripts(mfp_hyp));
        for (const auto &id : r.unknown_ids)
          std::cerr << "warning: hypothesis " << id << " has no manifest record\n";
        std::cerr << "dropped " << r.dropped << " records without a hypothesis\n";
        write_manifest(fs::path(mfp_out), r.manifest);
        return 0;
      }
    }

    if (ttsloss->parsed()) {
      if (tl_kl->parsed()) {
        const DiagGaussian q = gaussian_from_json(read_json(tk_q));
        MixturePrior prior;
        if (tk_prior == "default") {
          prior = default_mixture_prior(kDefaultMixtureComponents, q.dim());
        } else {
          const auto j = read_json(tk_prior);
          if (!j.contains("weights") || !j.contains("components"))
            throw Error(tk_prior + ": needs 'weights' and 'components'");
          const auto &wts = j["weights"];
          prior.weights.resize(static_cast<Index>(wts.size()));
          for (std::size_t i = 0; i < wts.size(); ++i)
            prior.weights[static_cast<Index>(i)] = wts[i].get<double>();
          for (const auto &c : j["components"]) prior.components.push_back(gaussian_from_json(c));
        }
        const auto est = mixture_kl_mc(q, prior, tk_samples, tk_seed);
        std::cout.precision(10);
        std::cout << "kl " << est.estimate << " stderr " << est.std_error << '\n';
        return 0;
      }
      if (tl_pred.empty() || tl_target.empty())
        throw UsageError("ttsloss needs --pred and --target (or the kl subcommand)");
      std::cout.precision(10);
      std::cout << "l1 " << l1_distance(read_fmx(tl_pred), read_fmx(tl_target)) << '\n';
      return 0;
    }
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
