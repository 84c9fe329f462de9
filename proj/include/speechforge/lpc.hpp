// speechforge/lpc.hpp

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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "speechforge/mel.hpp"

namespace sforge {

template <typename Scalar>
struct LpcSolution {
  Vec<Scalar> coeffs;      // a_1..a_P, prediction s[n] ~ sum a_k s[n-k]
  Vec<Scalar> reflection;  // k_1..k_P
  Scalar pred_error{};     // r_0 * prod(1 - k_i^2)
};

/// Levinson-Durbin recursion for the order-P Toeplitz normal equations
/// sum_k a_k r_|i-k| = r_i, i = 1..P.
///
/// Throws Error when r_0 <= 0, when fewer than P+1 lags are given, or when a
/// reflection coefficient reaches |k| >= 1 (the sequence is not positive
/// definite).
template <typename Scalar>
LpcSolution<Scalar> levinson_durbin(const Vec<Scalar> &r, Index order) {
  using std::abs;
  if (order < 0) throw Error("levinson_durbin: negative order");
  if (r.size() < order + 1)
    throw Error("levinson_durbin: need " + std::to_string(order + 1) +
                " autocorrelation lags, got " + std::to_string(r.size()));
  if (!(r[0] > Scalar(0)))
    throw Error("levinson_durbin: r_0 must be positive");

  LpcSolution<Scalar> out;
  out.coeffs = Vec<Scalar>::Zero(order);
  out.reflection = Vec<Scalar>::Zero(order);
  Vec<Scalar> prev(order);
  Scalar err = r[0];
  for (Index i = 1; i <= order; ++i) {
    Scalar acc = r[i];
    for (Index j = 1; j < i; ++j) acc -= out.coeffs[j - 1] * r[i - j];
    const Scalar k = acc / err;
    if (!(abs(k) < Scalar(1)))
      throw Error("levinson_durbin: singular autocorrelation (|k_" +
                  std::to_string(i) + "| >= 1)");
    prev.head(i - 1) = out.coeffs.head(i - 1);
    for (Index j = 1; j < i; ++j)
      out.coeffs[j - 1] = prev[j - 1] - k * prev[i - j - 1];
    out.coeffs[i - 1] = k;
    out.reflection[i - 1] = k;
    err *= Scalar(1) - k * k;
  }
  out.pred_error = err;
  return out;
}

/// Geometric over arithmetic mean of (power + 1e-12), clamped to [0, 1].
/// Throws if no entry is positive.
template <typename Derived>
double spectral_flatness(const Eigen::MatrixBase<Derived> &power) {
  constexpr double eps = 1e-12;
  if (power.size() == 0 || !(power.maxCoeff() > 0.0))
    throw Error("spectral_flatness: power spectrum has no positive entry");
  const auto shifted = (power.array().template cast<double>() + eps).eval();
  const double log_gm = shifted.log().mean();
  const double am = shifted.mean();
  const double sf = std::exp(log_gm) / am;
  return sf < 0.0 ? 0.0 : (sf > 1.0 ? 1.0 : sf);
}

struct LpcFrame {
  Vector coeffs;
  double pred_error = 0.0;
  double flatness = 0.0;
};

struct LpcOptions {
  Index order = 16;
  /// Gaussian lag window exp(-0.5 (2 pi bw k / fs)^2).
  double lag_window_hz = 60.0;
  /// r_0 is scaled by (1 + white_noise_correction) before the recursion.
  double white_noise_correction = 1e-4;
  int nnls_iterations = 200;
};

/// Expands a log-Mel frame to a linear power spectrum (NNLS, bins outside
/// every band copied from the nearest covered bin), takes the
/// autocorrelation of the mirrored spectrum, applies the lag window and runs
/// Levinson-Durbin. Flatness is measured on the expanded power spectrum.
LpcFrame mel_to_lpc(const Vector &mel_frame, const MelFilterbank &fb,
                    const LpcOptions &opts = {},
                    double log_floor = kDefaultLogFloor);

/// Linear power spectrum (bins) reconstructed from one log-Mel frame.
Vector mel_frame_to_power(const Vector &mel_frame, const MelFilterbank &fb,
                          int nnls_iterations = 200,
                          double log_floor = kDefaultLogFloor);

/// Autocorrelation lags 0..max_lag of the real signal whose one-sided power
/// spectrum (fft_size/2+1 bins) is given.
Vector power_to_autocorr(const Vector &power, Index max_lag);

// mu-law, mu = 255, offset-binary codes with 128 = exact zero, 255 = +1,
// 0 = -1. Inputs outside [-1, 1] are clamped.
inline constexpr int kMuLawZero = 128;
std::uint8_t mu_law_encode(double sample);
double mu_law_decode(std::uint8_t code);

/// Predictions are rounded to this dyadic grid, so analysis and synthesis
/// are exact inverses for signals on the grid (all PCM16 data is).
inline constexpr double kPredictionGrid = 0x1.0p-24;

/// e[n] = s[n] - Q(sum_k a_k s[n-k]) with zero history; frame
/// floor(n/frame_len) supplies the coefficients for sample n and Q rounds
/// to kPredictionGrid.
Vector lpc_analysis(const Vector &signal, std::span<const Vector> coeffs,
                    Index frame_len);

/// s[n] = e[n] + Q(sum_k a_k s[n-k]); inverse of lpc_analysis.
Vector lpc_synthesis(const Vector &excitation, std::span<const Vector> coeffs,
                     Index frame_len);

inline constexpr Index kTrainingChunk = 1600;

struct VocoderSequence {
  Vector samples;                     // chunk samples
  std::vector<std::uint8_t> excitation;  // mu-law codes, one per sample
  std::vector<LpcFrame> lpc;          // frames covering the chunk
  Matrix features;                    // matching log-Mel rows
};

/// Cuts `w` into non-overlapping chunks (remainder dropped). LPC frames come
/// from mel_to_lpc on each feature row; feature frame t drives samples
/// [t*hop, (t+1)*hop). Excitation is computed over the whole kept signal and
/// mu-law encoded. Requires hop to divide the chunk length.
std::vector<VocoderSequence> chunk_training_sequences(
    const Waveform &w, const MelSpectrogram &features, const MelFilterbank &fb,
    const LpcOptions &opts = {}, Index chunk = kTrainingChunk);

}  // namespace sforge
