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

#include <algorithm>
#include <vector>

#include "melaug/nn/layers.hpp"

namespace melaug::crnn {

using nn::MatX;
using nn::Var;

// Convolutional-recurrent classifier: conv blocks (3x3 conv, LeakyReLU, 2x2
// max-pool) followed by a bidirectional LSTM over the time axis and a dense
// head to class logits. Also serves as the FID feature extractor through its
// penultimate conv block.
struct CrnnArch {
  int image_size = 128;
  std::vector<int> channels = {16, 32, 64, 128};
  int kernel_size = 3;
  double leaky_relu_alpha = 0.2;
  int hidden_size = 128;
  int num_classes = 3;

  int blocks() const { return static_cast<int>(channels.size()); }
  int final_hw() const { return image_size >> blocks(); }
  int feature_dim() const {  // penultimate conv block channel count
    return channels[channels.size() - 2];
  }
};

template <typename S>
class CrnnNet {
 public:
  CrnnArch arch;
  nn::ParamStore<S> params;

  CrnnNet() = default;
  CrnnNet(const CrnnArch& a, std::uint64_t init_seed) : arch(a) {
    Rng rng = Rng::stream(init_seed, "crnn_init");
    int h = arch.image_size;
    int in_c = 1;
    for (int i = 0; i < arch.blocks(); ++i) {
      convs_.emplace_back(params, "conv" + std::to_string(i), h, h, in_c,
                          arch.channels[i], arch.kernel_size, 1, rng,
                          nn::InitStyle::glorot_uniform);
      in_c = arch.channels[i];
      h /= 2;
    }
    const int step_dim = arch.final_hw() * arch.channels.back();
    fwd_ = nn::Lstm<S>(params, "lstm_fwd", step_dim, arch.hidden_size, rng);
    bwd_ = nn::Lstm<S>(params, "lstm_bwd", step_dim, arch.hidden_size, rng);
    head_ = nn::Dense<S>(params, "head", 2 * arch.hidden_size, arch.num_classes, rng,
                         nn::InitStyle::glorot_uniform);
  }

  // x: (image_size^2 x n), norm_01 domain.
  Var<S> logits(const Var<S>& x) {
    require(x.rows() == static_cast<Eigen::Index>(arch.image_size) * arch.image_size,
            ErrorCode::shape_mismatch, "crnn: input size mismatch");
    Var<S> h = conv_stack(x, arch.blocks());
    const int hw = arch.final_hw();
    const int step_dim = hw * arch.channels.back();
    std::vector<Var<S>> steps;
    steps.reserve(hw);
    for (int w = 0; w < hw; ++w)
      steps.push_back(nn::slice_rows(h, static_cast<Eigen::Index>(w) * step_dim, step_dim));
    Var<S> hf = fwd_.forward_final(steps);
    std::reverse(steps.begin(), steps.end());
    Var<S> hb = bwd_.forward_final(steps);
    return head_.forward(nn::concat_rows(hf, hb));
  }

  Var<S> probabilities(const Var<S>& x) { return nn::softmax_cols(logits(x)); }

  // Penultimate conv block activations, global-average-pooled per channel.
  MatX<S> extract_features(const MatX<S>& x) {
    nn::NoGradGuard ng;
    Var<S> h = conv_stack(nn::constant<S>(MatX<S>(x)), arch.blocks() - 1);
    const int c = arch.feature_dim();
    const Eigen::Index pix = h.rows() / c;
    const Eigen::Index n = h.cols();
    MatX<S> out = MatX<S>::Zero(c, n);
    const MatX<S>& v = h.value();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index p = 0; p < pix; ++p)
        for (int k = 0; k < c; ++k) out(k, j) += v(p * c + k, j);
    out /= static_cast<S>(pix);
    return out;
  }

  std::vector<int> predict(const MatX<S>& x) {
    nn::NoGradGuard ng;
    Var<S> probs = probabilities(nn::constant<S>(MatX<S>(x)));
    return predict_from_probabilities(probs.value());
  }

  // Argmax per column; ties resolve to the lowest class index.
  static std::vector<int> predict_from_probabilities(const MatX<S>& probs) {
    std::vector<int> out(probs.cols());
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      int best = 0;
      for (Eigen::Index k = 1; k < probs.rows(); ++k)
        if (probs(k, j) > probs(best, j)) best = static_cast<int>(k);
      out[j] = best;
    }
    return out;
  }

 private:
  Var<S> conv_stack(const Var<S>& x, int n_blocks) {
    Var<S> h = x;
    int hw = arch.image_size;
    for (int i = 0; i < n_blocks; ++i) {
      h = convs_[i].forward(h);
      h = nn::leaky_relu(h, static_cast<S>(arch.leaky_relu_alpha));
      h = nn::maxpool2x2(h, hw, hw, arch.channels[i]);
      hw /= 2;
    }
    return h;
  }

  std::vector<nn::Conv2d<S>> convs_;
  nn::Lstm<S> fwd_, bwd_;
  nn::Dense<S> head_;
};

}  // namespace melaug::crnn
