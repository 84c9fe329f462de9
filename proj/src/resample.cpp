// src/resample.cpp

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

#include "speechforge/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sforge {

Vector sinc_interpolate(const Vector &x, double step, Index out_len,
                        double cutoff, int zero_crossings) {
  if (!(step > 0.0)) throw Error("sinc_interpolate: step must be positive");
  if (!(cutoff > 0.0 && cutoff <= 1.0))
    throw Error("sinc_interpolate: cutoff must lie in (0, 1]");
  Vector y = Vector::Zero(out_len);
  if (step == 1.0 && cutoff == 1.0) {
    const Index n = std::min(out_len, x.size());
    y.head(n) = x.head(n);
    return y;
  }

  const double half_width = zero_crossings / cutoff;
  const Index n_in = x.size();
  constexpr double pi = std::numbers::pi;
  for (Index n = 0; n < out_len; ++n) {
    const double t = n * step;
    const Index lo = std::max<Index>(0, static_cast<Index>(std::ceil(t - half_width)));
    const Index hi =
        std::min<Index>(n_in - 1, static_cast<Index>(std::floor(t + half_width)));
    double acc = 0.0;
    for (Index k = lo; k <= hi; ++k) {
      const double d = t - static_cast<double>(k);
      const double u = d / half_width;
      const double win = 0.5 * (1.0 + std::cos(pi * u));
      const double arg = pi * cutoff * d;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
      acc += x[k] * cutoff * sinc * win;
    }
    y[n] = acc;
  }
  return y;
}

Waveform resample(const Waveform &w, int out_rate) {
  if (out_rate <= 0) throw Error("resample: output rate must be positive");
  if (w.sample_rate <= 0) throw Error("resample: input rate must be positive");
  const double ratio = static_cast<double>(out_rate) / w.sample_rate;
  const auto out_len = static_cast<Index>(std::llround(w.size() * ratio));
  Waveform out;
  out.sample_rate = out_rate;
  out.samples = sinc_interpolate(w.samples, 1.0 / ratio, out_len,
                                 std::min(1.0, ratio));
  return out;
}

}  // namespace sforge
