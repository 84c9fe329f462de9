// speechforge/ttsloss.hpp

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
#include <vector>

#include "speechforge/types.hpp"

namespace sforge {

/// Mean absolute elementwise difference.
template <typename DerivedA, typename DerivedB>
double l1_distance(const Eigen::MatrixBase<DerivedA> &a,
                   const Eigen::MatrixBase<DerivedB> &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("l1_distance: shape mismatch " + std::to_string(a.rows()) +
                "x" + std::to_string(a.cols()) + " vs " +
                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  if (a.size() == 0) return 0.0;
  return (a.template cast<double>() - b.template cast<double>())
             .cwiseAbs()
             .sum() /
         static_cast<double>(a.size());
}

struct DiagGaussian {
  Vector mean;
  Vector log_var;

  Index dim() const { return mean.size(); }
  void validate() const;
};

struct MixturePrior {
  Vector weights;
  std::vector<DiagGaussian> components;

  Index num_components() const { return static_cast<Index>(components.size()); }
  Index dim() const { return components.empty() ? 0 : components.front().dim(); }
  void validate() const;
};

inline constexpr Index kDefaultLatentDim = 16;
inline constexpr Index kDefaultMixtureComponents = 10;

/// Equal-weight mixture with unit variances and means spread on the
/// coordinate axes (component j centered at +-2 e_{j mod D}).
MixturePrior default_mixture_prior(Index components = kDefaultMixtureComponents,
                                   Index dim = kDefaultLatentDim);

/// Closed-form KL(q || p) for diagonal Gaussians.
double gauss_kl(const DiagGaussian &q, const DiagGaussian &p);

double diag_gaussian_log_density(const DiagGaussian &g, const Vector &z);

/// log sum_j w_j N(z; mu_j, sigma_j), evaluated with log-sum-exp.
double mixture_log_density(const MixturePrior &p, const Vector &z);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// E_q[log q(z) - log p(z)] from n_samples reparameterized draws of q.
/// Normals come from a Box-Muller transform of std::mt19937_64(seed), so
/// the estimate is reproducible bit for bit.
MonteCarloEstimate mixture_kl_mc(const DiagGaussian &q, const MixturePrior &p,
                                 Index n_samples, std::uint64_t seed);

}  // namespace sforge
