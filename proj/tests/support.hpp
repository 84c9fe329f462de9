// tests/support.hpp

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

// Shared generators and independent reference implementations for tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "speechforge/types.hpp"

namespace sforge::testing {

/// Small seeded generator with the helpers the property tests need.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  long integer(long lo, long hi) {  // inclusive
    return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = uniform(0x1.0p-53, 1.0), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  Vector noise(Index n, double scale = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = scale * uniform(-1.0, 1.0);
    return v;
  }
  Matrix matrix(Index r, Index c, double lo, double hi) {
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }
  std::mt19937_64 &engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Waveform tone(double freq, double seconds, int rate = 16000, double amp = 0.5) {
  Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<Index>(std::llround(seconds * rate));
  w.samples.resize(n);
  for (Index i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return w;
}

/// Magnitude of the discrete-time Fourier transform at one frequency, by
/// direct summation over a Hann-tapered signal.
inline double dtft_magnitude(const Vector &x, double freq, int rate) {
  double re = 0.0, im = 0.0;
  const Index n = x.size();
  for (Index i = 0; i < n; ++i) {
    const double taper = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    const double ph = 2.0 * std::numbers::pi * freq * i / rate;
    re += taper * x[i] * std::cos(ph);
    im -= taper * x[i] * std::sin(ph);
  }
  return std::hypot(re, im);
}

/// Peak frequency: coarse scan over [lo, hi] then successive refinement.
inline double spectral_peak(const Vector &x, int rate, double lo, double hi) {
  double best = lo, step = 1.0;
  double best_mag = -1.0;
  for (double f = lo; f <= hi; f += step) {
    const double m = dtft_magnitude(x, f, rate);
    if (m > best_mag) best_mag = m, best = f;
  }
  for (int round = 0; round < 3; ++round) {
    const double centre = best;
    const double span = step;
    step /= 10.0;
    for (double f = centre - span; f <= centre + span; f += step) {
      const double m = dtft_magnitude(x, f, rate);
      if (m > best_mag) best_mag = m, best = f;
    }
  }
  return best;
}

/// Dense solve of the order-p Toeplitz normal equations R a = r[1..p].
inline Vector dense_toeplitz_solve(const Vector &r, Index p) {
  Matrix R(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) R(i, j) = r[std::abs(i - j)];
  return R.fullPivLu().solve(r.segment(1, p));
}

/// Autocorrelation of a random stable all-pole process driven by white
/// noise, which is positive definite by construction.
inline Vector random_autocorrelation(Gen &g, Index order) {
  const Index n = 4096;
  Vector k(order);
  for (Index i = 0; i < order; ++i) k[i] = g.uniform(-0.9, 0.9);
  // Step-up recursion from reflection coefficients gives a stable filter.
  Vector a = Vector::Zero(order);
  for (Index i = 0; i < order; ++i) {
    Vector prev = a;
    for (Index j = 0; j < i; ++j) a[j] = prev[j] - k[i] * prev[i - 1 - j];
    a[i] = k[i];
  }
  Vector x = Vector::Zero(n);
  for (Index t = 0; t < n; ++t) {
    double v = g.normal();
    for (Index j = 0; j < order && j < t; ++j) v += a[j] * x[t - 1 - j];
    x[t] = v;
  }
  Vector r(order + 1);
  for (Index lag = 0; lag <= order; ++lag)
    r[lag] = x.head(n - lag).dot(x.tail(n - lag)) / n;
  return r;
}

/// -log of the CTC probability by enumerating every length-T path over the
/// vocabulary and collapsing it.
inline double brute_force_ctc_loss(const Matrix &log_probs, const std::vector<int> &labels) {
  const Index T = log_probs.rows(), V = log_probs.cols();
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  double total = 0.0;
  for (;;) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int s : path) {
      if (s != 0 && s != prev) collapsed.push_back(s);
      prev = s;
    }
    if (collapsed == labels) {
      double lp = 0.0;
      for (Index t = 0; t < T; ++t) lp += log_probs(t, path[static_cast<std::size_t>(t)]);
      total += std::exp(lp);
    }
    Index pos = 0;
    while (pos < T && ++path[static_cast<std::size_t>(pos)] == V)
      path[static_cast<std::size_t>(pos++)] = 0;
    if (pos == T) break;
  }
  return total > 0.0 ? -std::log(total) : std::numeric_limits<double>::infinity();
}

/// Every label sequence with nonzero CTC probability, with its probability,
/// by path enumeration.
inline std::vector<std::pair<std::vector<int>, double>> exhaustive_ctc_sequences(
    const Matrix &log_probs) {
  const Index T = log_probs.rows(), V = log_probs.cols();
  std::vector<std::pair<std::vector<int>, double>> seqs;
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  for (;;) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int s : path) {
      if (s != 0 && s != prev) collapsed.push_back(s);
      prev = s;
    }
    double lp = 0.0;
    for (Index t = 0; t < T; ++t) lp += log_probs(t, path[static_cast<std::size_t>(t)]);
    auto it = std::find_if(seqs.begin(), seqs.end(),
                           [&](const auto &e) { return e.first == collapsed; });
    if (it == seqs.end()) seqs.emplace_back(collapsed, std::exp(lp));
    else it->second += std::exp(lp);
    Index pos = 0;
    while (pos < T && ++path[static_cast<std::size_t>(pos)] == V)
      path[static_cast<std::size_t>(pos++)] = 0;
    if (pos == T) break;
  }
  return seqs;
}

/// Plain unit-cost edit distance.
template <typename Seq>
long edit_distance(const Seq &a, const Seq &b) {
  std::vector<long> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Row-normalized random posteriorgram in log domain.
inline Matrix random_log_posteriors(Gen &g, Index T, Index V) {
  Matrix m(T, V);
  for (Index t = 0; t < T; ++t) {
    double sum = 0.0;
    for (Index v = 0; v < V; ++v) sum += (m(t, v) = g.uniform(0.05, 1.0));
    for (Index v = 0; v < V; ++v) m(t, v) = std::log(m(t, v) / sum);
  }
  return m;
}

// The 256 reconstruction levels of mu = 255 companding with 127 positive and
// 128 negative steps, from the companding curve itself.
inline std::vector<double> mu_law_levels() {
  std::vector<double> levels;
  for (int c = 0; c < 256; ++c) {
    const int u = c - 128;
    const double y = u >= 0 ? u / 127.0 : u / 128.0;
    const double mag = (std::exp(std::abs(y) * std::log(256.0)) - 1.0) / 255.0;
    levels.push_back(u < 0 ? -mag : mag);
  }
  return levels;
}

// Local quantization step at x: width of the level interval containing it.
inline double mu_law_local_step(const std::vector<double> &levels, double x) {
  auto hi = std::upper_bound(levels.begin(), levels.end(), x);
  if (hi == levels.begin()) return levels[1] - levels[0];
  if (hi == levels.end()) return levels[255] - levels[254];
  return *hi - *(hi - 1);
}

/// Lines of words drawn with a skewed distribution from a random lowercase
/// word list, so that frequent words repeat across lines.
inline std::vector<std::string> synthetic_corpus(Gen &g, int lines, int words_per_line = 12,
                                                 int word_types = 3000) {
  std::vector<std::string> types;
  for (int i = 0; i < word_types; ++i) {
    std::string w;
    for (long n = g.integer(2, 9); n > 0; --n) w += static_cast<char>('a' + g.integer(0, 25));
    types.push_back(w);
  }
  std::vector<std::string> out;
  for (int l = 0; l < lines; ++l) {
    std::string line;
    for (int k = 0; k < words_per_line; ++k) {
      const double u = g.uniform();
      const auto idx = static_cast<std::size_t>(u * u * word_types);
      if (k) line += ' ';
      line += types[std::min(idx, types.size() - 1)];
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace sforge::testing
