// speechforge/resample.hpp

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

#include "speechforge/types.hpp"

namespace sforge {

/// Hann-windowed sinc interpolation of `x` at positions n*step, n in
/// [0, out_len). `cutoff` is the lowpass corner as a fraction of the input
/// Nyquist (1 keeps everything the input can represent). Samples outside x
/// are zero.
Vector sinc_interpolate(const Vector &x, double step, Index out_len,
                        double cutoff, int zero_crossings = 32);

/// Band-limited rate conversion; output length round(len*out_rate/in_rate).
Waveform resample(const Waveform &w, int out_rate);

}  // namespace sforge
