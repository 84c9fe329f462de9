// src/features.cpp

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

#include "speechforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sforge {

namespace {

struct PitchEstimate {
  double voicing = 0.0;
  double lag = 0.0;
};

// Normalized cross-correlation over lags [min_lag, max_lag] of one frame.
PitchEstimate frame_pitch(const std::vector<double> &seg, Index min_lag,
                          Index max_lag) {
  const Index n = static_cast<Index>(seg.size()) - max_lag;
  double e0 = 0.0;
  for (Index i = 0; i < n; ++i) e0 += seg[i] * seg[i];
  if (e0 < 1e-12) return {};

  std::vector<double> nccf(max_lag + 2, 0.0);
  double el = 0.0;
  for (Index i = min_lag; i < min_lag + n; ++i) el += seg[i] * seg[i];
  for (Index lag = min_lag; lag <= max_lag; ++lag) {
    double xc = 0.0;
    for (Index i = 0; i < n; ++i) xc += seg[i] * seg[i + lag];
    nccf[lag] = el > 1e-12 ? xc / std::sqrt(e0 * el) : 0.0;
    if (lag < max_lag) {
      el += seg[lag + n] * seg[lag + n] - seg[lag] * seg[lag];
      el = std::max(el, 0.0);
    }
  }

  Index best = min_lag;
  for (Index lag = min_lag; lag <= max_lag; ++lag)
    if (nccf[lag] > nccf[best]) best = lag;
  // Prefer the shortest local maximum close to the global peak so that
  // multiples of the period do not win.
  for (Index lag = min_lag + 1; lag < max_lag; ++lag) {
    if (nccf[lag] >= 0.9 * nccf[best] && nccf[lag] >= nccf[lag - 1] &&
        nccf[lag] >= nccf[lag + 1]) {
      best = lag;
      break;
    }
  }

  double refined = static_cast<double>(best);
  if (best > min_lag && best < max_lag) {
    const double a = nccf[best - 1], b = nccf[best], c = nccf[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) refined += 0.5 * (a - c) / denom;
  }
  return {std::clamp(nccf[best], 0.0, 1.0), refined};
}

}  // namespace

void PitchConfig::validate(int sample_rate, const FrameParams &p) const {
  if (!(min_f0 > 0.0 && min_f0 < max_f0 && max_f0 <= sample_rate / 2.0))
    throw Error("pitch config: need 0 < min_f0 < max_f0 <= sample_rate/2");
  if (!(nccf_threshold >= 0.0 && nccf_threshold <= 1.0))
    throw Error("pitch config: nccf_threshold must lie in [0, 1]");
  if (median_width < 1) throw Error("pitch config: median_width must be >= 1");
  const auto max_lag = static_cast<Index>(std::ceil(sample_rate / min_f0));
  if (max_lag >= p.window_len)
    throw Error("pitch config: min_f0 period does not fit in the window");
}

Matrix pitch_features(const Waveform &w, const FrameParams &p,
                      const PitchConfig &pc) {
  p.validate();
  pc.validate(w.sample_rate, p);
  const Index n = w.size();
  const Index frames = num_frames(n, p);
  const auto min_lag = static_cast<Index>(std::floor(w.sample_rate / pc.max_f0));
  const auto max_lag = static_cast<Index>(std::ceil(w.sample_rate / pc.min_f0));

  Matrix out = Matrix::Zero(frames, kPitchDims);
  std::vector<double> seg(p.window_len);
  Vector raw_f0 = Vector::Zero(frames);
  for (Index t = 0; t < frames; ++t) {
    const Index center = p.centered ? t * p.hop_len : t * p.hop_len + p.fft_size / 2;
    const Index start = center - p.window_len / 2;
    for (Index i = 0; i < p.window_len; ++i)
      seg[i] = w.samples[reflect_index(start + i, n)];
    const PitchEstimate est = frame_pitch(seg, min_lag, max_lag);
    out(t, 0) = est.voicing;
    if (est.voicing >= pc.nccf_threshold && est.lag > 0.0)
      raw_f0[t] = w.sample_rate / est.lag;
  }

  const Index half = pc.median_width / 2;
  std::vector<double> window;
  for (Index t = 0; t < frames; ++t) {
    window.clear();
    for (Index j = std::max<Index>(0, t - half);
         j <= std::min<Index>(frames - 1, t + half); ++j)
      window.push_back(raw_f0[j]);
    auto mid = window.begin() + window.size() / 2;
    std::nth_element(window.begin(), mid, window.end());
    out(t, 1) = *mid;
  }
  for (Index t = 0; t < frames; ++t) {
    const double next = out(std::min(t + 1, frames - 1), 1);
    const double prev = out(std::max<Index>(t - 1, 0), 1);
    out(t, 2) = 0.5 * (next - prev);
  }
  return out;
}

FeatureMatrix fbank_pitch(const Waveform &w, const FrameParams &p,
                          const MelFilterbank &fb, const PitchConfig &pc,
                          double log_floor) {
  if (w.size() < p.window_len)
    throw Error("fbank_pitch: waveform has " + std::to_string(w.size()) +
                " samples, shorter than one window (" +
                std::to_string(p.window_len) + ")");
  const MelSpectrogram mel = mel_spectrogram(w, p, fb, log_floor);
  const Matrix pitch = pitch_features(w, p, pc);

  FeatureMatrix f;
  f.kind = FeatureKind::kFbankPitch;
  f.frame_rate = static_cast<double>(w.sample_rate) / p.hop_len;
  f.values.resize(mel.num_frames(), mel.num_mels() + kPitchDims);
  f.values.leftCols(mel.num_mels()) = mel.values;
  f.values.rightCols(kPitchDims) = pitch;
  return f;
}

CmvnStats compute_cmvn_stats(const Matrix &values) {
  CmvnStats s;
  const double n = static_cast<double>(values.rows());
  if (values.rows() == 0) throw Error("cmvn: empty feature matrix");
  s.mean = values.colwise().mean().transpose();
  s.var = ((values.rowwise() - s.mean.transpose()).array().square().colwise().sum() / n)
              .transpose();
  return s;
}

FeatureMatrix cmvn(const FeatureMatrix &f, CmvnScope scope,
                   const std::optional<CmvnStats> &stats) {
  if (f.cmvn_applied) throw Error("cmvn: features are already normalized");
  CmvnStats s;
  if (scope == CmvnScope::kPrecomputed) {
    if (!stats) throw Error("cmvn: precomputed scope requires stats");
    if (stats->mean.size() != f.dim() || stats->var.size() != f.dim())
      throw Error("cmvn: stats dimension " + std::to_string(stats->mean.size()) +
                  " does not match feature dimension " + std::to_string(f.dim()));
    s = *stats;
  } else {
    s = compute_cmvn_stats(f.values);
  }
  const Vector inv_std =
      s.var.cwiseMax(kCmvnVarianceFloor).cwiseSqrt().cwiseInverse();
  FeatureMatrix out = f;
  out.values = ((f.values.rowwise() - s.mean.transpose()).array().rowwise() *
                inv_std.transpose().array())
                   .matrix();
  out.cmvn_applied = true;
  return out;
}

}  // namespace sforge
