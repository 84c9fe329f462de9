// src/ttsloss.cpp

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

#include "speechforge/ttsloss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace sforge {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

void DiagGaussian::validate() const {
  if (mean.size() < 1) throw Error("gaussian: dimension must be >= 1");
  if (log_var.size() != mean.size())
    throw Error("gaussian: mean and log_var sizes differ");
  if (!mean.allFinite() || !log_var.allFinite())
    throw Error("gaussian: parameters must be finite");
}

void MixturePrior::validate() const {
  if (components.empty()) throw Error("mixture prior: no components");
  if (weights.size() != num_components())
    throw Error("mixture prior: " + std::to_string(weights.size()) +
                " weights for " + std::to_string(num_components()) +
                " components");
  if (weights.size() > 0 && weights.minCoeff() < 0.0)
    throw Error("mixture prior: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw Error("mixture prior: weights must sum to 1");
  for (const DiagGaussian &c : components) {
    c.validate();
    if (c.dim() != dim()) throw Error("mixture prior: components differ in dimension");
  }
}

MixturePrior default_mixture_prior(Index components, Index dim) {
  if (components < 1 || dim < 1)
    throw Error("default_mixture_prior: need components >= 1 and dim >= 1");
  MixturePrior p;
  p.weights = Vector::Constant(components, 1.0 / components);
  for (Index j = 0; j < components; ++j) {
    DiagGaussian g{Vector::Zero(dim), Vector::Zero(dim)};
    g.mean[j % dim] = (j / dim) % 2 == 0 ? 2.0 : -2.0;
    p.components.push_back(std::move(g));
  }
  return p;
}

double gauss_kl(const DiagGaussian &q, const DiagGaussian &p) {
  q.validate();
  p.validate();
  if (q.dim() != p.dim())
    throw Error("gauss_kl: dimension mismatch " + std::to_string(q.dim()) +
                " vs " + std::to_string(p.dim()));
  const Eigen::ArrayXd dlv = (q.log_var - p.log_var).array();
  const Eigen::ArrayXd diff2 = (q.mean - p.mean).array().square();
  return 0.5 * (dlv.exp() + diff2 / p.log_var.array().exp() - 1.0 - dlv).sum();
}

double diag_gaussian_log_density(const DiagGaussian &g, const Vector &z) {
  const Eigen::ArrayXd d = (z - g.mean).array();
  return -0.5 * (kLog2Pi + g.log_var.array() +
                 d.square() / g.log_var.array().exp())
                    .sum();
}

double mixture_log_density(const MixturePrior &p, const Vector &z) {
  std::vector<double> terms;
  terms.reserve(p.components.size());
  for (Index j = 0; j < p.num_components(); ++j) {
    if (p.weights[j] <= 0.0) continue;
    terms.push_back(std::log(p.weights[j]) +
                    diag_gaussian_log_density(p.components[j], z));
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

MonteCarloEstimate mixture_kl_mc(const DiagGaussian &q, const MixturePrior &p,
                                 Index n_samples, std::uint64_t seed) {
  if (p.components.empty()) throw Error("mixture_kl_mc: empty mixture");
  p.validate();
  q.validate();
  if (q.dim() != p.dim())
    throw Error("mixture_kl_mc: posterior dimension " + std::to_string(q.dim()) +
                " vs prior " + std::to_string(p.dim()));
  if (n_samples < 1) throw Error("mixture_kl_mc: n_samples must be >= 1");

  NormalSource normals(seed);
  const Vector sigma = (0.5 * q.log_var.array()).exp().matrix();
  Vector z(q.dim());
  // Welford accumulation of the per-sample log ratio.
  double mean = 0.0, m2 = 0.0;
  for (Index i = 0; i < n_samples; ++i) {
    for (Index d = 0; d < q.dim(); ++d) z[d] = q.mean[d] + sigma[d] * normals.next();
    const double v = diag_gaussian_log_density(q, z) - mixture_log_density(p, z);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  MonteCarloEstimate out;
  out.estimate = mean;
  if (n_samples > 1) {
    const double var = m2 / static_cast<double>(n_samples - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n_samples));
  }
  return out;
}

}  // namespace sforge
