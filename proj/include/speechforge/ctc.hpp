// speechforge/ctc.hpp

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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "speechforge/ngram.hpp"
#include "speechforge/types.hpp"

namespace sforge {

inline constexpr int kCtcBlank = 0;

/// Frame-wise log posteriors, T x V, blank at column 0.
struct PosteriorGram {
  Matrix log_probs;

  Index num_frames() const { return log_probs.rows(); }
  Index vocab_size() const { return log_probs.cols(); }
  /// Each row must log-sum-exp to 0 within tol.
  void validate(double tol = 1e-6) const;

  static PosteriorGram from_probs(const Matrix &probs);
  static PosteriorGram from_logits(const Matrix &logits);
};

/// Row-wise log-softmax.
Matrix log_softmax(const Matrix &logits);
double log_sum_exp(double a, double b);

/// Frames needed by a label sequence: its length plus one blank per
/// adjacent repeat.
Index ctc_min_frames(std::span<const int> labels);
bool ctc_feasible(std::span<const int> labels, Index frames);

/// -log sum over alignments, by the log-domain forward recursion. Returns
/// +infinity when the labels cannot fit in the available frames.
double ctc_loss(const PosteriorGram &pg, std::span<const int> labels);

/// d loss / d logits (softmax taken internally), by forward-backward.
/// Throws Error on infeasible labels.
Matrix ctc_grad(const Matrix &logits, std::span<const int> labels,
                double *loss = nullptr);

/// Per-frame argmax (ties to the lower id), repeats collapsed, blanks removed.
std::vector<int> ctc_greedy(const PosteriorGram &pg);

/// Deterministic scorer over token prefixes, in log domain.
class SequenceScorer {
 public:
  virtual ~SequenceScorer() = default;
  virtual double score_step(std::span<const int> prefix, int token) const = 0;
  /// End-of-sequence term, added once when a hypothesis is finalized.
  virtual double score_final(std::span<const int> prefix) const {
    (void)prefix;
    return 0.0;
  }
};

/// Table-driven stub: scores depend on (previous token, token); the
/// previous token of an empty prefix is -1.
class TableScorer : public SequenceScorer {
 public:
  explicit TableScorer(double default_step = 0.0, double default_final = 0.0)
      : default_step_(default_step), default_final_(default_final) {}

  void set_step(int prev, int token, double score) { step_[{prev, token}] = score; }
  void set_final(int last, double score) { final_[last] = score; }

  double score_step(std::span<const int> prefix, int token) const override;
  double score_final(std::span<const int> prefix) const override;

 private:
  double default_step_, default_final_;
  std::map<std::pair<int, int>, double> step_;
  std::map<int, double> final_;
};

/// Adapts an n-gram model to token ids through an id -> string vocabulary.
class NGramScorer : public SequenceScorer {
 public:
  NGramScorer(const NGramModel &lm, std::vector<std::string> id_to_token);

  double score_step(std::span<const int> prefix, int token) const override;
  double score_final(std::span<const int> prefix) const override;

 private:
  std::vector<std::string> history(std::span<const int> prefix) const;

  const NGramModel &lm_;
  std::vector<std::string> vocab_;
};

struct FusionWeights {
  double ctc_weight = 0.5;  // lambda
  double lm_weight = 0.7;   // beta
  int beam_size = 20;

  void validate() const;
};

/// lambda * ctc + (1 - lambda) * aux + beta * lm. A zero weight drops its
/// term, so an impossible score under an unused scorer does not give NaN.
double fuse_scores(double ctc, double aux, double lm, const FusionWeights &w);

struct Hypothesis {
  std::vector<int> tokens;
  double score_total = 0.0;
  double score_ctc = 0.0;
  double score_aux = 0.0;
  double score_lm = 0.0;
};

/// CTC prefix beam search with log-linear fusion. Scorers may be null.
/// Returned hypotheses are sorted by score_total descending, ties by token
/// sequence ascending; at most nbest (0 = all surviving prefixes).
std::vector<Hypothesis> ctc_prefix_beam(const PosteriorGram &pg,
                                        const FusionWeights &w,
                                        const SequenceScorer *lm = nullptr,
                                        const SequenceScorer *aux = nullptr,
                                        std::size_t nbest = 0);

}  // namespace sforge
