// src/ctc.cpp

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

#include "speechforge/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sforge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_labels(std::span<const int> labels, Index vocab) {
  for (int l : labels)
    if (l <= kCtcBlank || l >= vocab)
      throw Error("ctc: label " + std::to_string(l) + " outside [1, " +
                  std::to_string(vocab) + ")");
}

// Log-domain forward (alpha) and backward (beta) over the blank-extended
// label sequence; beta includes the emission at its own frame.
struct Lattice {
  Matrix alpha, beta;
  std::vector<int> ext;
};

std::vector<int> extend(std::span<const int> labels) {
  std::vector<int> ext(2 * labels.size() + 1, kCtcBlank);
  for (std::size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  return ext;
}

Matrix forward(const Matrix &lp, const std::vector<int> &ext) {
  const Index T = lp.rows();
  const Index S = static_cast<Index>(ext.size());
  Matrix a = Matrix::Constant(T, S, kNegInf);
  a(0, 0) = lp(0, ext[0]);
  if (S > 1) a(0, 1) = lp(0, ext[1]);
  for (Index t = 1; t < T; ++t) {
    for (Index s = 0; s < S; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = log_sum_exp(acc, a(t - 1, s - 1));
      if (s >= 2 && ext[s] != kCtcBlank && ext[s] != ext[s - 2])
        acc = log_sum_exp(acc, a(t - 1, s - 2));
      a(t, s) = acc + lp(t, ext[s]);
    }
  }
  return a;
}

Matrix backward(const Matrix &lp, const std::vector<int> &ext) {
  const Index T = lp.rows();
  const Index S = static_cast<Index>(ext.size());
  Matrix b = Matrix::Constant(T, S, kNegInf);
  b(T - 1, S - 1) = lp(T - 1, ext[S - 1]);
  if (S > 1) b(T - 1, S - 2) = lp(T - 1, ext[S - 2]);
  for (Index t = T - 2; t >= 0; --t) {
    for (Index s = 0; s < S; ++s) {
      double acc = b(t + 1, s);
      if (s + 1 < S) acc = log_sum_exp(acc, b(t + 1, s + 1));
      if (s + 2 < S && ext[s] != kCtcBlank && ext[s] != ext[s + 2])
        acc = log_sum_exp(acc, b(t + 1, s + 2));
      b(t, s) = acc + lp(t, ext[s]);
    }
  }
  return b;
}

double total_logprob(const Matrix &alpha) {
  const Index T = alpha.rows(), S = alpha.cols();
  double p = alpha(T - 1, S - 1);
  if (S > 1) p = log_sum_exp(p, alpha(T - 1, S - 2));
  return p;
}

bool sequence_less(const std::vector<int> &a, const std::vector<int> &b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

Matrix log_softmax(const Matrix &logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Index t = 0; t < logits.rows(); ++t) {
    const double peak = logits.row(t).maxCoeff();
    const double lse =
        peak + std::log((logits.row(t).array() - peak).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

void PosteriorGram::validate(double tol) const {
  if (log_probs.rows() < 1 || log_probs.cols() < 2)
    throw Error("posteriorgram: need at least one frame and two classes");
  for (Index t = 0; t < log_probs.rows(); ++t) {
    if (log_probs.row(t).array().isNaN().any())
      throw Error("posteriorgram: NaN in frame " + std::to_string(t));
    double lse = kNegInf;
    for (Index v = 0; v < log_probs.cols(); ++v) lse = log_sum_exp(lse, log_probs(t, v));
    if (!(std::abs(lse) <= tol))
      throw Error("posteriorgram: frame " + std::to_string(t) +
                  " does not normalize (log-sum-exp " + std::to_string(lse) + ")");
  }
}

PosteriorGram PosteriorGram::from_probs(const Matrix &probs) {
  PosteriorGram pg{probs.array().log().matrix()};
  pg.validate();
  return pg;
}

PosteriorGram PosteriorGram::from_logits(const Matrix &logits) {
  return PosteriorGram{log_softmax(logits)};
}

Index ctc_min_frames(std::span<const int> labels) {
  Index need = static_cast<Index>(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++need;
  return need;
}

bool ctc_feasible(std::span<const int> labels, Index frames) {
  return ctc_min_frames(labels) <= frames;
}

double ctc_loss(const PosteriorGram &pg, std::span<const int> labels) {
  if (pg.num_frames() < 1) throw Error("ctc_loss: empty posteriorgram");
  check_labels(labels, pg.vocab_size());
  if (!ctc_feasible(labels, pg.num_frames())) return std::numeric_limits<double>::infinity();
  return -total_logprob(forward(pg.log_probs, extend(labels)));
}

Matrix ctc_grad(const Matrix &logits, std::span<const int> labels, double *loss) {
  if (logits.rows() < 1) throw Error("ctc_grad: empty logits");
  check_labels(labels, logits.cols());
  if (!ctc_feasible(labels, logits.rows()))
    throw Error("ctc_grad: " + std::to_string(labels.size()) + " labels do not fit in " +
                std::to_string(logits.rows()) + " frames");
  const Matrix lp = log_softmax(logits);
  const std::vector<int> ext = extend(labels);
  const Matrix a = forward(lp, ext);
  const Matrix b = backward(lp, ext);
  const double log_total = total_logprob(a);
  if (loss) *loss = -log_total;

  // gamma(t, k) = sum over extended positions carrying k of alpha*beta/y.
  Matrix grad = lp.array().exp().matrix();
  const Index S = static_cast<Index>(ext.size());
  for (Index t = 0; t < lp.rows(); ++t) {
    std::vector<double> occ(static_cast<std::size_t>(lp.cols()), kNegInf);
    for (Index s = 0; s < S; ++s)
      occ[ext[s]] = log_sum_exp(occ[ext[s]], a(t, s) + b(t, s) - lp(t, ext[s]));
    for (Index k = 0; k < lp.cols(); ++k)
      if (occ[k] != kNegInf) grad(t, k) -= std::exp(occ[k] - log_total);
  }
  return grad;
}

std::vector<int> ctc_greedy(const PosteriorGram &pg) {
  std::vector<int> out;
  int prev = kCtcBlank;
  for (Index t = 0; t < pg.num_frames(); ++t) {
    int best = 0;
    for (Index v = 1; v < pg.vocab_size(); ++v)
      if (pg.log_probs(t, v) > pg.log_probs(t, best)) best = static_cast<int>(v);
    if (best != kCtcBlank && best != prev) out.push_back(best);
    prev = best;
  }
  return out;
}

double TableScorer::score_step(std::span<const int> prefix, int token) const {
  const int prev = prefix.empty() ? -1 : prefix.back();
  auto it = step_.find({prev, token});
  return it == step_.end() ? default_step_ : it->second;
}

double TableScorer::score_final(std::span<const int> prefix) const {
  const int last = prefix.empty() ? -1 : prefix.back();
  auto it = final_.find(last);
  return it == final_.end() ? default_final_ : it->second;
}

NGramScorer::NGramScorer(const NGramModel &lm, std::vector<std::string> id_to_token)
    : lm_(lm), vocab_(std::move(id_to_token)) {}

std::vector<std::string> NGramScorer::history(std::span<const int> prefix) const {
  std::vector<std::string> h{std::string(kSentenceStart)};
  const std::size_t keep =
      std::min(prefix.size(), static_cast<std::size_t>(std::max(lm_.order() - 1, 0)));
  for (std::size_t i = prefix.size() - keep; i < prefix.size(); ++i) {
    const int id = prefix[i];
    if (id < 0 || id >= static_cast<int>(vocab_.size()))
      throw Error("ngram scorer: token id " + std::to_string(id) + " outside vocabulary");
    h.push_back(vocab_[id]);
  }
  return h;
}

double NGramScorer::score_step(std::span<const int> prefix, int token) const {
  if (token < 0 || token >= static_cast<int>(vocab_.size()))
    throw Error("ngram scorer: token id " + std::to_string(token) + " outside vocabulary");
  return lm_.logprob(history(prefix), vocab_[token]);
}

double NGramScorer::score_final(std::span<const int> prefix) const {
  return lm_.logprob(history(prefix), kSentenceEnd);
}

void FusionWeights::validate() const {
  if (!(ctc_weight >= 0.0 && ctc_weight <= 1.0))
    throw Error("fusion: ctc weight must lie in [0, 1]");
  if (!(lm_weight >= 0.0) || !std::isfinite(lm_weight))
    throw Error("fusion: lm weight must be >= 0");
  if (beam_size < 1) throw Error("fusion: beam size must be >= 1");
}

double fuse_scores(double ctc, double aux, double lm, const FusionWeights &w) {
  auto term = [](double weight, double s) { return weight == 0.0 ? 0.0 : weight * s; };
  return term(w.ctc_weight, ctc) + term(1.0 - w.ctc_weight, aux) + term(w.lm_weight, lm);
}

std::vector<Hypothesis> ctc_prefix_beam(const PosteriorGram &pg, const FusionWeights &w,
                                        const SequenceScorer *lm,
                                        const SequenceScorer *aux, std::size_t nbest) {
  w.validate();
  if (pg.num_frames() < 1 || pg.vocab_size() < 1)
    throw Error("ctc_prefix_beam: empty posteriorgram");

  struct Entry {
    double pb = kNegInf, pnb = kNegInf;
    double aux = 0.0, lm = 0.0;
    double ctc() const { return log_sum_exp(pb, pnb); }
  };
  using Beam = std::map<std::vector<int>, Entry>;

  auto rank = [&](Beam &beam) {
    std::vector<std::pair<double, const std::vector<int> *>> order;
    order.reserve(beam.size());
    for (const auto &[p, e] : beam)
      order.emplace_back(fuse_scores(e.ctc(), e.aux, e.lm, w), &p);
    std::stable_sort(order.begin(), order.end(), [](const auto &x, const auto &y) {
      return x.first > y.first;  // map order already breaks ties by sequence
    });
    return order;
  };

  Beam beam;
  beam[{}].pb = 0.0;
  const Matrix &lp = pg.log_probs;
  for (Index t = 0; t < pg.num_frames(); ++t) {
    Beam next;
    for (const auto &[prefix, e] : beam) {
      const double total = e.ctc();
      auto seed = [&](const std::vector<int> &p) -> Entry & {
        auto [it, fresh] = next.try_emplace(p);
        if (fresh) {
          it->second.aux = e.aux;
          it->second.lm = e.lm;
        }
        return it->second;
      };
      Entry &same = seed(prefix);
      same.pb = log_sum_exp(same.pb, total + lp(t, kCtcBlank));
      if (!prefix.empty())
        same.pnb = log_sum_exp(same.pnb, e.pnb + lp(t, prefix.back()));
      for (Index v = 1; v < pg.vocab_size(); ++v) {
        const double emit = lp(t, v);
        if (emit == kNegInf) continue;
        const int c = static_cast<int>(v);
        std::vector<int> ext = prefix;
        ext.push_back(c);
        auto [it, fresh] = next.try_emplace(ext);
        Entry &n = it->second;
        if (fresh) {
          n.aux = e.aux + (aux ? aux->score_step(prefix, c) : 0.0);
          n.lm = e.lm + (lm ? lm->score_step(prefix, c) : 0.0);
        }
        const double from = (!prefix.empty() && prefix.back() == c) ? e.pb : total;
        n.pnb = log_sum_exp(n.pnb, from + emit);
      }
    }
    const auto order = rank(next);
    Beam kept;
    for (std::size_t i = 0; i < order.size() && i < static_cast<std::size_t>(w.beam_size); ++i) {
      const auto &p = *order[i].second;
      if (order[i].first == kNegInf && !kept.empty()) break;
      kept.emplace(p, next.at(p));
    }
    beam = std::move(kept);
  }

  std::vector<Hypothesis> out;
  for (const auto &[prefix, e] : beam) {
    Hypothesis h;
    h.tokens = prefix;
    h.score_ctc = e.ctc();
    h.score_aux = e.aux + (aux ? aux->score_final(prefix) : 0.0);
    h.score_lm = e.lm + (lm ? lm->score_final(prefix) : 0.0);
    h.score_total = fuse_scores(h.score_ctc, h.score_aux, h.score_lm, w);
    out.push_back(std::move(h));
  }
  std::stable_sort(out.begin(), out.end(), [](const Hypothesis &a, const Hypothesis &b) {
    if (a.score_total != b.score_total) return a.score_total > b.score_total;
    return sequence_less(a.tokens, b.tokens);
  });
  if (nbest > 0 && out.size() > nbest) out.resize(nbest);
  return out;
}

}  // namespace sforge
