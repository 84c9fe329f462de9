// src/griffin_lim.cpp

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

#include "speechforge/griffin_lim.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

namespace sforge {

double gram_spectral_norm(const Matrix &a) {
  // The smaller Gram matrix has the same nonzero spectrum.
  const Matrix g = a.rows() <= a.cols() ? Matrix(a * a.transpose())
                                        : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Matrix nnls_initial_guess(const Matrix &a, const Matrix &b) {
  const Vector row_sum = a.rowwise().sum();
  const Vector col_sum = a.colwise().sum().transpose();
  Matrix level = b;
  for (Index m = 0; m < a.rows(); ++m)
    level.row(m) *= row_sum[m] > 0.0 ? 1.0 / row_sum[m] : 0.0;
  Matrix x0 = a.transpose() * level;
  for (Index k = 0; k < a.cols(); ++k)
    x0.row(k) *= col_sum[k] > 0.0 ? 1.0 / col_sum[k] : 0.0;
  return x0.cwiseMax(0.0);
}

Matrix nnls_projected_gradient(const Matrix &a, const Matrix &b,
                               const Matrix &x0, int iterations) {
  if (a.rows() != b.rows() || a.cols() != x0.rows() || b.cols() != x0.cols())
    throw Error("nnls: operand shapes do not agree");
  const double lipschitz = gram_spectral_norm(a);
  if (!(lipschitz > 0.0)) return Matrix::Zero(a.cols(), b.cols());
  const double step = 1.0 / lipschitz;
  const Matrix atb = a.transpose() * b;
  const Matrix ata = a.transpose() * a;

  Matrix x = x0.cwiseMax(0.0);
  Matrix prev = x;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Matrix y = x + ((t - 1.0) / t_next) * (x - prev);
    prev = x;
    x = (y - step * (ata * y - atb)).cwiseMax(0.0);
    t = t_next;
  }
  return x;
}

Matrix mel_to_linear(const MelSpectrogram &m, const MelFilterbank &fb,
                     int iterations) {
  check_filterbank(fb, m.params, m.sample_rate);
  if (m.num_mels() != fb.num_mels())
    throw Error("mel_to_linear: spectrogram has " +
                std::to_string(m.num_mels()) + " bands, filterbank " +
                std::to_string(fb.num_mels()));
  const double silent = std::log(m.log_floor) + 1e-9;
  Matrix target = m.values.transpose();  // n_mels x frames
  for (Index i = 0; i < target.size(); ++i) {
    double &v = target.data()[i];
    v = v <= silent ? 0.0 : std::exp(v);
  }
  const Matrix x0 = nnls_initial_guess(fb.weights, target);
  return nnls_projected_gradient(fb.weights, target, x0, iterations)
      .transpose();
}

namespace {

double relative_error(const Matrix &estimate, const Matrix &target,
                      double target_norm) {
  if (target_norm == 0.0) return 0.0;
  return (estimate - target).norm() / target_norm;
}

ComplexMatrix unit_phase(const ComplexMatrix &s) {
  ComplexMatrix out(s.rows(), s.cols());
  for (Index i = 0; i < s.size(); ++i) {
    const double r = std::abs(s.data()[i]);
    out.data()[i] = r > 0.0 ? s.data()[i] / r : std::complex<double>(1.0, 0.0);
  }
  return out;
}

}  // namespace

GriffinLimResult griffin_lim(const Matrix &mag, const FrameParams &p,
                             int sample_rate, const GriffinLimConfig &cfg,
                             const ComplexMatrix *initial_phase) {
  check_overlap_add(p);
  if (cfg.n_iters < 0) throw Error("griffin_lim: n_iters must be >= 0");
  if (mag.cols() != p.num_bins())
    throw Error("griffin_lim: magnitude has " + std::to_string(mag.cols()) +
                " bins, params imply " + std::to_string(p.num_bins()));
  if (!mag.allFinite() || (mag.size() > 0 && mag.minCoeff() < 0.0))
    throw Error("griffin_lim: magnitude must be finite and nonnegative");

  FrameParams full = p;
  full.centered = false;

  ComplexSpectrogram spec;
  spec.params = full;
  spec.sample_rate = sample_rate;

  ComplexMatrix phase;
  if (initial_phase) {
    if (initial_phase->rows() != mag.rows() || initial_phase->cols() != mag.cols())
      throw Error("griffin_lim: initial phase shape mismatch");
    phase = unit_phase(*initial_phase);
  } else if (cfg.init == PhaseInit::kRandom) {
    std::mt19937_64 rng(cfg.seed);
    phase.resize(mag.rows(), mag.cols());
    for (Index i = 0; i < phase.size(); ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      phase.data()[i] = std::polar(1.0, 2.0 * std::numbers::pi * u);
    }
  } else {
    phase = ComplexMatrix::Ones(mag.rows(), mag.cols());
  }

  GriffinLimResult result;
  result.errors.reserve(cfg.n_iters + 1);
  const double target_norm = mag.norm();

  spec.values = mag.cast<std::complex<double>>().cwiseProduct(phase);
  Waveform x = istft(spec);
  for (int it = 0;; ++it) {
    const ComplexSpectrogram rebuilt = stft(x, full);
    result.errors.push_back(
        relative_error(rebuilt.values.cwiseAbs(), mag, target_norm));
    if (it == cfg.n_iters) break;
    spec.values = mag.cast<std::complex<double>>().cwiseProduct(
        unit_phase(rebuilt.values));
    x = istft(spec);
  }

  result.wav.sample_rate = sample_rate;
  if (p.centered)
    result.wav.samples =
        x.samples.segment(p.fft_size / 2, istft_length(mag.rows(), p));
  else
    result.wav.samples = std::move(x.samples);
  return result;
}

double spectral_convergence(const Matrix &mag, const Waveform &w,
                            const FrameParams &p) {
  const double target_norm = mag.norm();
  if (target_norm == 0.0)
    throw Error("spectral_convergence: target magnitude has zero norm");
  const Matrix est = magnitude(stft(w, p));
  if (est.rows() != mag.rows() || est.cols() != mag.cols())
    throw Error("spectral_convergence: waveform gives " +
                std::to_string(est.rows()) + "x" + std::to_string(est.cols()) +
                " frames/bins, target is " + std::to_string(mag.rows()) + "x" +
                std::to_string(mag.cols()));
  return (est - mag).norm() / target_norm;
}

}  // namespace sforge
