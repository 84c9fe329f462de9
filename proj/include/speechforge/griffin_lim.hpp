// speechforge/griffin_lim.hpp

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
#include <optional>
#include <vector>

#include "speechforge/mel.hpp"

namespace sforge {

inline constexpr int kDefaultNnlsIterations = 200;

/// Largest eigenvalue of A^T A (the gradient Lipschitz constant of
/// 0.5*||A x - b||^2).
double gram_spectral_norm(const Matrix &a);

/// Column-wise nonnegative least squares: each column of the result
/// approximately minimizes ||A x - b||_2 subject to x >= 0. Accelerated
/// projected gradient with a fixed iteration count, started from `x0`.
Matrix nnls_projected_gradient(const Matrix &a, const Matrix &b,
                               const Matrix &x0,
                               int iterations = kDefaultNnlsIterations);

/// Starting point that spreads each band's mean level (b_m / rowsum_m)
/// back over the bins it covers; bins no band covers start at 0.
Matrix nnls_initial_guess(const Matrix &a, const Matrix &b);

/// Linear-frequency magnitudes (frames x bins, >= 0) whose Mel projection
/// best matches exp(m). Cells at the log floor are treated as silence.
Matrix mel_to_linear(const MelSpectrogram &m, const MelFilterbank &fb,
                     int iterations = kDefaultNnlsIterations);

enum class PhaseInit { kZero, kRandom };

struct GriffinLimConfig {
  int n_iters = 60;
  PhaseInit init = PhaseInit::kZero;
  std::uint64_t seed = 0;
};

struct GriffinLimResult {
  Waveform wav;
  /// errors[i] is the spectral convergence after i updates, i in [0, n_iters].
  std::vector<double> errors;
};

/// Plain Griffin-Lim: x <- istft(mag * phase(stft(x))).
///
/// Iterates on the full overlap-add support of the frames (uncentered
/// geometry) so that every update is an exact least-squares projection and
/// the error sequence cannot increase. The returned waveform is trimmed to
/// istft_length(frames, p). `initial_phase`, when given, overrides
/// cfg.init; only its phase angle is used.
GriffinLimResult griffin_lim(const Matrix &mag, const FrameParams &p,
                             int sample_rate, const GriffinLimConfig &cfg,
                             const ComplexMatrix *initial_phase = nullptr);

/// ||stft(w)| - mag||_F / ||mag||_F. Throws on a zero target or on a
/// frame/bin count mismatch.
double spectral_convergence(const Matrix &mag, const Waveform &w,
                            const FrameParams &p);

}  // namespace sforge
