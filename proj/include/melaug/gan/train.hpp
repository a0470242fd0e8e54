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

#include <cmath>
#include <vector>

#include "melaug/gan/losses.hpp"
#include "melaug/gan/model.hpp"
#include "melaug/nn/adam.hpp"

namespace melaug::gan {

struct GanTrainConfig {
  GanArch arch;
  double lambda_gp = 10.0;
  double lambda_recon = 10.0;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.9;
  int batch_size = 8;
  std::int64_t iterations = 150000;
  int critic_steps = 5;
  std::int64_t checkpoint_interval = 5000;
  int log_interval = 10;
  bool sample_dropout = true;
  double cond_jitter = 0.05;
  std::uint64_t seed = 0;
};

// Minority-class training set: norm_pm1 spectrogram columns paired with their
// conditioning vectors.
template <typename S>
struct GanDataset {
  MatX<S> specs;  // (image_size^2 x N)
  MatX<S> conds;  // (cond_dim x N)
};

struct TrainLogRow {
  std::int64_t iteration = 0;
  double critic_total = 0.0;
  double generator_total = 0.0;
  double gp = 0.0;
  double recon = 0.0;
};

// Alternating WGAN-GP optimization: critic_steps critic updates per generator
// update. All randomness (batches, alphas, dropout) is drawn from streams
// keyed by (seed, iteration, step), so a resumed run replays the exact
// trajectory of a straight-through run.
template <typename S>
class GanTrainer {
 public:
  GanTrainer(GanDataset<S> data, const GanTrainConfig& cfg)
      : data_(std::move(data)),
        cfg_(cfg),
        g_(cfg.arch, cfg.seed),
        c_(cfg.arch, cfg.seed),
        adam_g_(g_.params, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2),
        adam_c_(c_.params, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2) {
    require(data_.specs.cols() > 0, ErrorCode::invalid_argument,
            "train_gan: empty dataset");
    require(data_.specs.cols() == data_.conds.cols(), ErrorCode::invalid_argument,
            "train_gan: spectrogram/conditioning count mismatch");
  }

  TrainLogRow step() {
    const std::int64_t it = ++iteration_;
    const auto lam_gp = static_cast<S>(cfg_.lambda_gp);
    double last_critic = 0.0, last_gp = 0.0;

    for (int cs = 0; cs < cfg_.critic_steps; ++cs) {
      MatX<S> real, cond;
      draw_batch(it, cs, real, cond);
      MatX<S> fake;
      {
        nn::NoGradGuard ng;
        Rng drng = Rng::stream(cfg_.seed, "g_dropout_critic", it, cs);
        fake = g_.forward(nn::constant<S>(cond), /*train=*/true, drng).value();
      }
      Var<S> cond_c = nn::constant<S>(cond);
      Var<S> scores_real = c_.forward(nn::constant<S>(real), cond_c);
      Var<S> scores_fake = c_.forward(nn::constant<S>(fake), cond_c);
      WganLosses<S> wl = wgan_losses(scores_real, scores_fake);

      Rng arng = Rng::stream(cfg_.seed, "gp_alpha", it, cs);
      auto critic_fn = [&](const Var<S>& xhat) { return c_.forward(xhat, cond_c); };
      Var<S> gp = gradient_penalty<S>(critic_fn, real, fake, arng);
      Var<S> critic_total = nn::add(wl.critic_loss, nn::scale(gp, lam_gp));

      auto grads = nn::backward(critic_total, c_.params.vars());
      adam_c_.step(grads, c_.params);
      last_critic = static_cast<double>(critic_total.scalar());
      last_gp = static_cast<double>(gp.scalar());
    }

    MatX<S> real, cond;
    draw_batch(it, cfg_.critic_steps, real, cond);
    Rng drng = Rng::stream(cfg_.seed, "g_dropout_gen", it);
    Var<S> cond_c = nn::constant<S>(cond);
    Var<S> fake = g_.forward(cond_c, /*train=*/true, drng);
    Var<S> scores = c_.forward(fake, cond_c);
    Var<S> gen_wgan = nn::neg(nn::mean_all(scores));
    Var<S> recon = recon_loss(nn::constant<S>(real), fake);
    Var<S> gen_total =
        nn::add(gen_wgan, nn::scale(recon, static_cast<S>(cfg_.lambda_recon)));
    auto grads = nn::backward(gen_total, g_.params.vars());
    adam_g_.step(grads, g_.params);

    TrainLogRow row{it, last_critic, static_cast<double>(gen_total.scalar()), last_gp,
                    static_cast<double>(recon.scalar())};
    if (!std::isfinite(row.critic_total) || !std::isfinite(row.generator_total) ||
        !std::isfinite(row.gp) || !std::isfinite(row.recon))
      fail(ErrorCode::numerical,
           "train_gan: non-finite loss at iteration " + std::to_string(it));
    return row;
  }

  std::int64_t iteration() const { return iteration_; }
  void set_iteration(std::int64_t it) { iteration_ = it; }
  GeneratorNet<S>& generator() { return g_; }
  CriticNet<S>& critic() { return c_; }
  nn::Adam<S>& adam_g() { return adam_g_; }
  nn::Adam<S>& adam_c() { return adam_c_; }
  const GanTrainConfig& config() const { return cfg_; }

 private:
  void draw_batch(std::int64_t it, int step, MatX<S>& real, MatX<S>& cond) const {
    Rng rng = Rng::stream(cfg_.seed, "gan_batch", static_cast<std::uint64_t>(it),
                          static_cast<std::uint64_t>(step));
    const Eigen::Index N = data_.specs.cols();
    real.resize(data_.specs.rows(), cfg_.batch_size);
    cond.resize(data_.conds.rows(), cfg_.batch_size);
    for (int j = 0; j < cfg_.batch_size; ++j) {
      const auto idx = rng.uniform_int(0, N - 1);
      real.col(j) = data_.specs.col(idx);
      cond.col(j) = data_.conds.col(idx);
    }
  }

  GanDataset<S> data_;
  GanTrainConfig cfg_;
  GeneratorNet<S> g_;
  CriticNet<S> c_;
  nn::Adam<S> adam_g_, adam_c_;
  std::int64_t iteration_ = 0;
};

// Deterministic sampling from a trained (or freshly initialized) generator.
// Dropout noise stays on by default; batch-norm uses running statistics.
template <typename S>
MatX<S> sample_generator(GeneratorNet<S>& g, const MatX<S>& conds, std::uint64_t seed,
                         bool use_dropout = true) {
  nn::NoGradGuard ng;
  Rng drng = Rng::stream(seed, "sample_dropout");
  return g.forward(nn::constant<S>(conds), /*train=*/false, drng, use_dropout).value();
}

}  // namespace melaug::gan
