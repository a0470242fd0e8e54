// Copyright 2026 The melaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <limits>

#include "melaug/core/rng.hpp"
#include "melaug/nn/var.hpp"

namespace melaug::gan {

using nn::MatX;
using nn::Var;

// Wasserstein objective: the critic drives real scores above fake ones
// (critic_loss = E[fake] - E[real], minimized), the generator drives fake
// scores up (generator_loss = -E[fake]).
template <typename S>
struct WganLosses {
  Var<S> critic_loss;
  Var<S> generator_loss;
};

template <typename S>
WganLosses<S> wgan_losses(const Var<S>& real_scores, const Var<S>& fake_scores) {
  require(real_scores.cols() > 0 && fake_scores.cols() > 0, ErrorCode::invalid_argument,
          "wgan_losses: empty batch");
  require(real_scores.cols() == fake_scores.cols(), ErrorCode::shape_mismatch,
          "wgan_losses: score batch mismatch");
  Var<S> fake_mean = nn::mean_all(fake_scores);
  return {nn::sub(fake_mean, nn::mean_all(real_scores)), nn::neg(fake_mean)};
}

// Mean over the batch of (||grad_xhat D(xhat)||_2 - 1)^2, with xhat drawn on
// the segment between paired real and fake examples (per-example alpha).
// The returned Var is differentiable w.r.t. the critic parameters: the inner
// backward pass builds graph nodes, so optimizing the penalty is exact
// second-order differentiation rather than an approximation.
template <typename S>
Var<S> gradient_penalty(const std::function<Var<S>(const Var<S>&)>& critic,
                        const MatX<S>& real, const MatX<S>& fake,
                        const Eigen::Matrix<S, 1, Eigen::Dynamic>& alphas) {
  require(real.rows() == fake.rows() && real.cols() == fake.cols(),
          ErrorCode::shape_mismatch, "gradient_penalty: batch shape mismatch");
  require(alphas.cols() == real.cols(), ErrorCode::shape_mismatch,
          "gradient_penalty: one alpha per example required");
  const Eigen::Index n = real.cols();

  MatX<S> mix(real.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j)
    mix.col(j) = alphas(0, j) * fake.col(j) + (S(1) - alphas(0, j)) * real.col(j);
  Var<S> xhat = nn::leaf<S>(std::move(mix));

  Var<S> scores = critic(xhat);
  Var<S> g;
  if (scores.requires_grad()) {
    auto grads = nn::backward(nn::rowwise_sum(scores), {xhat});
    auto it = grads.find(xhat.node());
    g = it != grads.end() ? it->second
                          : nn::constant<S>(MatX<S>::Zero(real.rows(), n));
  } else {
    // A critic that ignores its input has an identically zero gradient.
    g = nn::constant<S>(MatX<S>::Zero(real.rows(), n));
  }
  // The tiny offset keeps sqrt differentiable at exactly zero gradient.
  Var<S> norms =
      nn::sqrt_(nn::add_scalar(nn::colwise_sum(nn::square(g)), std::numeric_limits<S>::min()));
  return nn::mean_all(nn::square(nn::add_scalar(norms, S(-1))));
}

template <typename S>
Var<S> gradient_penalty(const std::function<Var<S>(const Var<S>&)>& critic,
                        const MatX<S>& real, const MatX<S>& fake, Rng& rng) {
  Eigen::Matrix<S, 1, Eigen::Dynamic> alphas(1, real.cols());
  for (Eigen::Index j = 0; j < real.cols(); ++j)
    alphas(0, j) = static_cast<S>(rng.uniform());
  return gradient_penalty<S>(critic, real, fake, alphas);
}

// Mean absolute difference over all cells (the expectation form of the
// reconstruction loss, realized per cell).
template <typename S>
Var<S> recon_loss(const Var<S>& real, const Var<S>& fake) {
  require(real.rows() == fake.rows() && real.cols() == fake.cols(),
          ErrorCode::shape_mismatch, "recon_loss: shape mismatch");
  return nn::mean_all(nn::abs_(nn::sub(real, fake)));
}

template <typename S>
struct TotalLosses {
  Var<S> critic_total;
  Var<S> generator_total;
};

template <typename S>
TotalLosses<S> total_losses(const WganLosses<S>& wgan, const Var<S>& gp,
                            const Var<S>& recon, double lambda_gp, double lambda_recon) {
  return {nn::add(wgan.critic_loss, nn::scale(gp, static_cast<S>(lambda_gp))),
          nn::add(wgan.generator_loss, nn::scale(recon, static_cast<S>(lambda_recon)))};
}

}  // namespace melaug::gan
