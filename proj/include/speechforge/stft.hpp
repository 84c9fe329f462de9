// speechforge/stft.hpp

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

enum class WindowKind { kHann, kHamming };

/// Frame geometry shared by every spectral op.
///
/// Invariants: 0 < hop_len <= window_len <= fft_size, fft_size a power of
/// two. When `centered` is set, the signal is reflect-padded by fft_size/2 on
/// both sides, so frame t is centered on sample t*hop_len and a signal of N
/// samples yields floor(N/hop_len)+1 frames.
struct FrameParams {
  Index window_len = 800;
  Index hop_len = 200;
  Index fft_size = 1024;
  WindowKind window_kind = WindowKind::kHann;
  bool centered = true;

  Index num_bins() const { return fft_size / 2 + 1; }

  /// Throws Error when an invariant is violated.
  void validate() const;

  /// Geometry from window/hop durations in seconds; fft_size is the next
  /// power of two >= window length.
  static FrameParams from_durations(int sample_rate, double window_s,
                                    double hop_s);

  /// 50 ms window, 12.5 ms hop.
  static FrameParams synthesis_default(int sample_rate = 16000) {
    return from_durations(sample_rate, 0.050, 0.0125);
  }

  bool operator==(const FrameParams &) const = default;
};

Index next_pow2(Index n);

/// Maps any integer index onto [0, n) by mirror reflection about the end
/// samples (no edge repeat), folding as often as needed.
Index reflect_index(Index i, Index n);

/// Periodic analysis window of window_len samples.
Vector make_window(WindowKind kind, Index window_len);

/// The window zero-padded to fft_size and centered in the FFT frame.
Vector padded_window(const FrameParams &p);

struct ComplexSpectrogram {
  ComplexMatrix values;  // frames x bins
  FrameParams params;
  int sample_rate = 16000;

  Index num_frames() const { return values.rows(); }
  Index num_bins() const { return values.cols(); }
};

/// Number of frames stft() produces for `num_samples` input samples.
Index num_frames(Index num_samples, const FrameParams &p);

/// Length of the signal istft() returns for `frames` frames:
/// (frames-1)*hop when centered, (frames-1)*hop + fft_size otherwise.
Index istft_length(Index frames, const FrameParams &p);

ComplexSpectrogram stft(const Waveform &w, const FrameParams &p);

/// Weighted overlap-add inverse (least-squares estimate from a possibly
/// inconsistent spectrogram). Throws if the window/hop pair fails the
/// nonzero-overlap-add condition.
Waveform istft(const ComplexSpectrogram &s);

/// Throws Error when overlapped squared windows vanish somewhere, which
/// makes exact reconstruction impossible.
void check_overlap_add(const FrameParams &p);

/// Elementwise magnitude.
Matrix magnitude(const ComplexSpectrogram &s);

}  // namespace sforge
