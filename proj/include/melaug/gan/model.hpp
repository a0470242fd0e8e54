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

#include <string>
#include <vector>

#include "melaug/nn/adam.hpp"
#include "melaug/nn/layers.hpp"

namespace melaug::gan {

using nn::MatX;
using nn::Var;

// DCGAN-style conditional pair: the generator maps a length-cond_dim contour
// through a dense projection and `stages` upsampling convolutions to a
// tanh-bounded image; the critic projects the contour to an image plane,
// concatenates it with the input image on the channel axis and runs `stages`
// stride-2 convolutions into an unbounded score.
struct GanArch {
  int image_size = 128;
  int cond_dim = 128;
  int base_channels = 64;  // top of the channel ladder is base_channels << (stages-1)
  int stages = 5;
  int kernel_size = 5;
  double dropout_p = 0.5;
  double leaky_relu_alpha = 0.2;

  int seed_hw() const { return image_size >> stages; }
  int generator_channels(int stage) const {  // stage 0 holds the widest maps
    return base_channels << (stages - 1 - stage);
  }
  int critic_channels(int stage) const { return base_channels << stage; }
};

struct ShapeRow {
  std::string op;
  std::vector<Eigen::Index> dims;  // (n, H, W, C) for images, (n, d) for vectors
};

template <typename S>
class GeneratorNet {
 public:
  GanArch arch;
  nn::ParamStore<S> params;

  GeneratorNet() = default;
  GeneratorNet(const GanArch& a, std::uint64_t init_seed) : arch(a) {
    Rng rng = Rng::stream(init_seed, "generator_init");
    const int hw = arch.seed_hw();
    const int c0 = arch.generator_channels(0);
    dense_ = nn::Dense<S>(params, "g.dense", arch.cond_dim,
                          static_cast<Eigen::Index>(hw) * hw * c0, rng,
                          nn::InitStyle::dcgan_normal);
    for (int i = 0; i < arch.stages; ++i) {
      const int h = hw << i;
      const int in_c = arch.generator_channels(i);
      const int out_c = i + 1 < arch.stages ? arch.generator_channels(i + 1) : 1;
      convs_.emplace_back(params, "g.stage" + std::to_string(i) + ".conv", 2 * h, 2 * h,
                          in_c, out_c, arch.kernel_size, 1, rng,
                          nn::InitStyle::dcgan_normal);
      if (i + 1 < arch.stages)
        bns_.emplace_back(params, "g.stage" + std::to_string(i) + ".bn", out_c, rng);
    }
  }

  // cond: (cond_dim x n) in [0,1]. Output: (image_size^2 x n) in [-1,1].
  // Dropout stays active in sample mode (it is the generator's noise source);
  // batch-norm uses batch statistics in train mode, running statistics
  // otherwise.
  Var<S> forward(const Var<S>& cond, bool train, Rng& dropout_rng,
                 bool use_dropout = true) {
    require(cond.rows() == arch.cond_dim, ErrorCode::shape_mismatch,
            "generator: conditioning vector length mismatch");
    const Eigen::Index n = cond.cols();
    const int hw = arch.seed_hw();
    shapes_.clear();
    shapes_.push_back({"input", {n, arch.cond_dim}});

    Var<S> x = dense_.forward(cond);
    shapes_.push_back({"dense", {n, x.rows()}});
    shapes_.push_back({"reshape", {n, hw, hw, arch.generator_channels(0)}});
    if (use_dropout && arch.dropout_p > 0)
      x = nn::dropout(x, arch.dropout_p, dropout_rng);
    shapes_.push_back({"dropout", {n, hw, hw, arch.generator_channels(0)}});
    x = nn::relu(x);
    shapes_.push_back({"relu", {n, hw, hw, arch.generator_channels(0)}});

    for (int i = 0; i < arch.stages; ++i) {
      const int h_in = hw << i;
      const int h_out = 2 * h_in;
      const int in_c = arch.generator_channels(i);
      const int out_c = i + 1 < arch.stages ? arch.generator_channels(i + 1) : 1;
      x = nn::upsample2x(x, h_in, h_in, in_c);
      x = convs_[i].forward(x);
      shapes_.push_back({"upsample_conv", {n, h_out, h_out, out_c}});
      if (i + 1 < arch.stages) {
        x = bns_[i].forward(x, train);
        if (i == 0) {
          if (use_dropout && arch.dropout_p > 0)
            x = nn::dropout(x, arch.dropout_p, dropout_rng);
          shapes_.push_back({"dropout", {n, h_out, h_out, out_c}});
        }
        x = nn::relu(x);
        shapes_.push_back({"relu", {n, h_out, h_out, out_c}});
      }
    }
    x = nn::tanh_(x);
    shapes_.push_back({"tanh", {n, arch.image_size, arch.image_size, 1}});
    return x;
  }

  const std::vector<ShapeRow>& last_shapes() const { return shapes_; }

  // Non-parameter state that checkpoints must carry (batch-norm running stats).
  std::vector<std::pair<std::string, MatX<S>*>> aux_state() {
    std::vector<std::pair<std::string, MatX<S>*>> out;
    for (std::size_t i = 0; i < bns_.size(); ++i) {
      out.emplace_back("g.stage" + std::to_string(i) + ".bn.running_mean",
                       &bns_[i].running_mean);
      out.emplace_back("g.stage" + std::to_string(i) + ".bn.running_var",
                       &bns_[i].running_var);
    }
    return out;
  }

 private:
  nn::Dense<S> dense_;
  std::vector<nn::Conv2d<S>> convs_;
  std::vector<nn::BatchNorm2d<S>> bns_;
  std::vector<ShapeRow> shapes_;
};

template <typename S>
class CriticNet {
 public:
  GanArch arch;
  nn::ParamStore<S> params;

  CriticNet() = default;
  CriticNet(const GanArch& a, std::uint64_t init_seed) : arch(a) {
    Rng rng = Rng::stream(init_seed, "critic_init");
    const int img = arch.image_size;
    cond_dense_ = nn::Dense<S>(params, "c.cond_dense", arch.cond_dim,
                               static_cast<Eigen::Index>(img) * img, rng,
                               nn::InitStyle::dcgan_normal);
    int h = img;
    for (int i = 0; i < arch.stages; ++i) {
      const int in_c = i == 0 ? 2 : arch.critic_channels(i - 1);
      const int out_c = arch.critic_channels(i);
      convs_.emplace_back(params, "c.stage" + std::to_string(i) + ".conv", h, h, in_c,
                          out_c, arch.kernel_size, 2, rng, nn::InitStyle::dcgan_normal);
      lns_.emplace_back(params, "c.stage" + std::to_string(i) + ".ln", out_c);
      h /= 2;
    }
    const Eigen::Index flat =
        static_cast<Eigen::Index>(h) * h * arch.critic_channels(arch.stages - 1);
    head_ = nn::Dense<S>(params, "c.head", flat, 1, rng, nn::InitStyle::dcgan_normal);
  }

  // spec: (image_size^2 x n) in [-1,1], cond: (cond_dim x n). One score per column.
  Var<S> forward(const Var<S>& spec, const Var<S>& cond) {
    const Eigen::Index n = spec.cols();
    const int img = arch.image_size;
    require(spec.rows() == static_cast<Eigen::Index>(img) * img, ErrorCode::shape_mismatch,
            "critic: spectrogram size mismatch");
    require(cond.cols() == n, ErrorCode::shape_mismatch, "critic: batch size mismatch");
    shapes_.clear();
    shapes_.push_back({"input_f0", {n, arch.cond_dim}});

    Var<S> proj = cond_dense_.forward(cond);
    shapes_.push_back({"dense", {n, proj.rows()}});
    shapes_.push_back({"reshape", {n, img, img, 1}});
    shapes_.push_back({"input_spec", {n, img, img, 1}});

    Var<S> x = nn::concat_channels(proj, spec, static_cast<std::int64_t>(img) * img, 1, 1);
    shapes_.push_back({"concat", {n, img, img, 2}});

    int h = img;
    for (int i = 0; i < arch.stages; ++i) {
      x = convs_[i].forward(x);
      h /= 2;
      x = lns_[i].forward(x);
      x = nn::leaky_relu(x, static_cast<S>(arch.leaky_relu_alpha));
      shapes_.push_back({"conv", {n, h, h, arch.critic_channels(i)}});
      shapes_.push_back({"leaky_relu", {n, h, h, arch.critic_channels(i)}});
    }
    shapes_.push_back({"flatten", {n, x.rows()}});
    Var<S> score = head_.forward(x);
    shapes_.push_back({"dense_out", {n, 1}});
    return score;  // (1 x n)
  }

  const std::vector<ShapeRow>& last_shapes() const { return shapes_; }

 private:
  nn::Dense<S> cond_dense_;
  std::vector<nn::Conv2d<S>> convs_;
  std::vector<nn::LayerNormCh<S>> lns_;
  nn::Dense<S> head_;
  std::vector<ShapeRow> shapes_;
};

}  // namespace melaug::gan
