// src/lpc.cpp

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

#include "speechforge/lpc.hpp"

#include <algorithm>
#include <numbers>

#include "speechforge/griffin_lim.hpp"

namespace sforge {

Vector mel_frame_to_power(const Vector &mel_frame, const MelFilterbank &fb,
                          int nnls_iterations, double log_floor) {
  if (mel_frame.size() != fb.num_mels())
    throw Error("mel_to_lpc: frame has " + std::to_string(mel_frame.size()) +
                " bands, filterbank " + std::to_string(fb.num_mels()));
  const double silent = std::log(log_floor) + 1e-9;
  Matrix target(fb.num_mels(), 1);
  for (Index m = 0; m < fb.num_mels(); ++m)
    target(m, 0) = mel_frame[m] <= silent ? 0.0 : std::exp(mel_frame[m]);
  const Matrix x0 = nnls_initial_guess(fb.weights, target);
  Vector mag = nnls_projected_gradient(fb.weights, target, x0, nnls_iterations).col(0);

  // Bins below the first band / above the last get the nearest covered value.
  const Vector col_sum = fb.weights.colwise().sum().transpose();
  Index first = 0, last = col_sum.size() - 1;
  while (first < col_sum.size() && col_sum[first] <= 0.0) ++first;
  while (last >= 0 && col_sum[last] <= 0.0) --last;
  if (first <= last) {
    for (Index k = 0; k < first; ++k) mag[k] = mag[first];
    for (Index k = last + 1; k < mag.size(); ++k) mag[k] = mag[last];
  }
  return mag.cwiseAbs2();
}

Vector power_to_autocorr(const Vector &power, Index max_lag) {
  const Index half = power.size() - 1;
  const Index n = 2 * half;
  if (half < 1) throw Error("power_to_autocorr: need at least two bins");
  Vector r(max_lag + 1);
  for (Index lag = 0; lag <= max_lag; ++lag) {
    double acc = power[0] + power[half] * (lag % 2 == 0 ? 1.0 : -1.0);
    for (Index j = 1; j < half; ++j)
      acc += 2.0 * power[j] *
             std::cos(2.0 * std::numbers::pi * static_cast<double>(j * lag % n) / n);
    r[lag] = acc / n;
  }
  return r;
}

LpcFrame mel_to_lpc(const Vector &mel_frame, const MelFilterbank &fb,
                    const LpcOptions &opts, double log_floor) {
  if (opts.order < 1) throw Error("mel_to_lpc: order must be >= 1");
  const Vector power =
      mel_frame_to_power(mel_frame, fb, opts.nnls_iterations, log_floor);

  LpcFrame out;
  if (!(power.maxCoeff() > 0.0)) {
    // Silent frame: no prediction, flat by convention.
    out.coeffs = Vector::Zero(opts.order);
    out.flatness = 1.0;
    return out;
  }
  out.flatness = spectral_flatness(power);

  Vector r = power_to_autocorr(power, opts.order);
  const double w = 2.0 * std::numbers::pi * opts.lag_window_hz / fb.sample_rate;
  for (Index k = 1; k <= opts.order; ++k) r[k] *= std::exp(-0.5 * w * w * k * k);
  r[0] *= 1.0 + opts.white_noise_correction;

  const LpcSolution<double> sol = levinson_durbin(r, opts.order);
  out.coeffs = sol.coeffs;
  out.pred_error = std::max(0.0, sol.pred_error);
  return out;
}

std::uint8_t mu_law_encode(double sample) {
  constexpr double mu = 255.0;
  const double x = std::clamp(sample, -1.0, 1.0);
  const double y = std::copysign(std::log1p(mu * std::abs(x)) / std::log1p(mu), x);
  const double scaled = y >= 0.0 ? 127.0 * y : 128.0 * y;
  return static_cast<std::uint8_t>(kMuLawZero + std::lround(scaled));
}

double mu_law_decode(std::uint8_t code) {
  constexpr double mu = 255.0;
  const int u = static_cast<int>(code) - kMuLawZero;
  if (u == 0) return 0.0;
  const double y = u > 0 ? u / 127.0 : u / 128.0;
  return std::copysign((std::pow(1.0 + mu, std::abs(y)) - 1.0) / mu, y);
}

namespace {

void check_coverage(Index n, std::span<const Vector> coeffs, Index frame_len) {
  if (frame_len <= 0) throw Error("lpc: frame_len must be positive");
  if (static_cast<Index>(coeffs.size()) * frame_len < n)
    throw Error("lpc: " + std::to_string(coeffs.size()) + " frames of " +
                std::to_string(frame_len) + " samples do not cover " +
                std::to_string(n) + " samples");
}

double predict(const Vector &a, const Vector &history, Index n) {
  double p = 0.0;
  const Index order = std::min<Index>(a.size(), n);
  for (Index k = 1; k <= order; ++k) p += a[k - 1] * history[n - k];
  return std::nearbyint(p / kPredictionGrid) * kPredictionGrid;
}

}  // namespace

Vector lpc_analysis(const Vector &signal, std::span<const Vector> coeffs,
                    Index frame_len) {
  check_coverage(signal.size(), coeffs, frame_len);
  Vector e(signal.size());
  for (Index n = 0; n < signal.size(); ++n)
    e[n] = signal[n] - predict(coeffs[n / frame_len], signal, n);
  return e;
}

Vector lpc_synthesis(const Vector &excitation, std::span<const Vector> coeffs,
                     Index frame_len) {
  check_coverage(excitation.size(), coeffs, frame_len);
  Vector s(excitation.size());
  for (Index n = 0; n < excitation.size(); ++n)
    s[n] = excitation[n] + predict(coeffs[n / frame_len], s, n);
  return s;
}

std::vector<VocoderSequence> chunk_training_sequences(
    const Waveform &w, const MelSpectrogram &features, const MelFilterbank &fb,
    const LpcOptions &opts, Index chunk) {
  const Index hop = features.params.hop_len;
  if (chunk <= 0 || hop <= 0 || chunk % hop != 0)
    throw Error("chunk_training_sequences: hop " + std::to_string(hop) +
                " does not divide chunk length " + std::to_string(chunk));
  check_filterbank(fb, features.params, w.sample_rate);
  std::vector<VocoderSequence> out;
  const Index n_chunks = w.size() / chunk;
  if (n_chunks == 0) return out;

  const Index frames_per_chunk = chunk / hop;
  const Index frames_needed = n_chunks * frames_per_chunk;
  if (features.num_frames() < frames_needed)
    throw Error("chunk_training_sequences: " +
                std::to_string(features.num_frames()) +
                " feature frames, need " + std::to_string(frames_needed));

  std::vector<LpcFrame> lpc(frames_needed);
  std::vector<Vector> coeffs(frames_needed);
  for (Index t = 0; t < frames_needed; ++t) {
    lpc[t] = mel_to_lpc(features.values.row(t).transpose(), fb, opts,
                        features.log_floor);
    coeffs[t] = lpc[t].coeffs;
  }
  const Vector kept = w.samples.head(n_chunks * chunk);
  const Vector excitation = lpc_analysis(kept, coeffs, hop);

  out.reserve(n_chunks);
  for (Index i = 0; i < n_chunks; ++i) {
    VocoderSequence seq;
    seq.samples = kept.segment(i * chunk, chunk);
    seq.excitation.resize(chunk);
    for (Index j = 0; j < chunk; ++j)
      seq.excitation[j] = mu_law_encode(excitation[i * chunk + j]);
    seq.lpc.assign(lpc.begin() + i * frames_per_chunk,
                   lpc.begin() + (i + 1) * frames_per_chunk);
    seq.features = features.values.middleRows(i * frames_per_chunk, frames_per_chunk);
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace sforge
