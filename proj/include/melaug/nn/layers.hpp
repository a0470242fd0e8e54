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

#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "melaug/core/rng.hpp"
#include "melaug/nn/var.hpp"

namespace melaug::nn {

// Image activations are (H*W*C x n) matrices with per-example layout
// flat = (w*H + h)*C + c  (w = time axis, h = frequency axis, c = channel).

template <typename S>
class ParamStore {
 public:
  Var<S> add(const std::string& name, MatX<S> init) {
    entries_.emplace_back(name, param_leaf<S>(std::move(init)));
    return entries_.back().second;
  }
  const std::vector<std::pair<std::string, Var<S>>>& entries() const { return entries_; }
  std::vector<Var<S>> vars() const {
    std::vector<Var<S>> out;
    out.reserve(entries_.size());
    for (const auto& [name, v] : entries_) out.push_back(v);
    return out;
  }
  Var<S> find(const std::string& name) const {
    for (const auto& [n, v] : entries_)
      if (n == name) return v;
    fail(ErrorCode::invalid_argument, "ParamStore: no parameter named " + name);
  }
  std::size_t total_size() const {
    std::size_t s = 0;
    for (const auto& [n, v] : entries_) s += static_cast<std::size_t>(v.value().size());
    return s;
  }

 private:
  std::vector<std::pair<std::string, Var<S>>> entries_;
};

template <typename S>
MatX<S> init_normal(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  MatX<S> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = static_cast<S>(stddev * rng.normal());
  return m;
}

template <typename S>
MatX<S> init_glorot(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out,
                    Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  MatX<S> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = static_cast<S>(rng.uniform(-a, a));
  return m;
}

enum class InitStyle { dcgan_normal, glorot_uniform };

template <typename S>
struct Dense {
  Var<S> W, b;  // (out x in), (out x 1)

  Dense() = default;
  Dense(ParamStore<S>& store, const std::string& prefix, Eigen::Index in,
        Eigen::Index out, Rng& rng, InitStyle style) {
    MatX<S> w = style == InitStyle::dcgan_normal
                    ? init_normal<S>(out, in, 0.02, rng)
                    : init_glorot<S>(out, in, static_cast<double>(in),
                                     static_cast<double>(out), rng);
    W = store.add(prefix + ".W", std::move(w));
    b = store.add(prefix + ".b", MatX<S>::Zero(out, 1));
  }

  Var<S> forward(const Var<S>& x) const {
    return add(matmul(W, x), broadcast_cols(b, x.cols()));
  }
};

// 2-D convolution, TF-style 'same' padding, lowered to gather + GEMM.
template <typename S>
struct Conv2d {
  int H = 0, W_img = 0, in_c = 0, out_c = 0, k = 3, stride = 1;
  int Ho = 0, Wo = 0, pad_lo = 0;
  Var<S> W, b;  // (out_c x k*k*in_c), (out_c x 1)
  mutable std::map<Eigen::Index, RunMapPtr> im2col_cache;

  Conv2d() = default;
  Conv2d(ParamStore<S>& store, const std::string& prefix, int H_, int W_, int in_c_,
         int out_c_, int k_, int stride_, Rng& rng, InitStyle style)
      : H(H_), W_img(W_), in_c(in_c_), out_c(out_c_), k(k_), stride(stride_) {
    if (stride == 1) {
      Ho = H;
      Wo = W_img;
      pad_lo = (k - 1) / 2;
    } else {
      Ho = (H + stride - 1) / stride;
      Wo = (W_img + stride - 1) / stride;
      const int total = std::max(0, (Ho - 1) * stride + k - H);
      pad_lo = total / 2;
    }
    const Eigen::Index fan = static_cast<Eigen::Index>(k) * k * in_c;
    MatX<S> w = style == InitStyle::dcgan_normal
                    ? init_normal<S>(out_c, fan, 0.02, rng)
                    : init_glorot<S>(out_c, fan, static_cast<double>(fan),
                                     static_cast<double>(k) * k * out_c, rng);
    W = store.add(prefix + ".W", std::move(w));
    b = store.add(prefix + ".b", MatX<S>::Zero(out_c, 1));
  }

  RunMapPtr im2col_map(Eigen::Index n) const {
    auto it = im2col_cache.find(n);
    if (it != im2col_cache.end()) return it->second;
    auto map = std::make_shared<RunMap>();
    const std::int64_t in_img = static_cast<std::int64_t>(H) * W_img * in_c;
    const std::int64_t kkc = static_cast<std::int64_t>(k) * k * in_c;
    const std::int64_t out_pix = static_cast<std::int64_t>(Ho) * Wo;
    for (Eigen::Index img = 0; img < n; ++img) {
      for (int wo = 0; wo < Wo; ++wo) {
        for (int ho = 0; ho < Ho; ++ho) {
          const std::int64_t col = img * out_pix + static_cast<std::int64_t>(wo) * Ho + ho;
          const std::int64_t b_base = col * kkc;
          for (int dw = 0; dw < k; ++dw) {
            const int wi = wo * stride - pad_lo + dw;
            if (wi < 0 || wi >= W_img) {
              map->push_back({-1, b_base + static_cast<std::int64_t>(dw) * k * in_c,
                              static_cast<std::int32_t>(k) * in_c});
              continue;
            }
            const int hi0 = ho * stride - pad_lo;
            if (hi0 >= 0 && hi0 + k <= H) {  // whole column of the patch in bounds
              map->push_back({img * in_img + (static_cast<std::int64_t>(wi) * H + hi0) * in_c,
                              b_base + static_cast<std::int64_t>(dw) * k * in_c,
                              static_cast<std::int32_t>(k) * in_c});
              continue;
            }
            for (int dh = 0; dh < k; ++dh) {
              const int hi = hi0 + dh;
              const std::int64_t b_off =
                  b_base + (static_cast<std::int64_t>(dw) * k + dh) * in_c;
              if (hi < 0 || hi >= H)
                map->push_back({-1, b_off, static_cast<std::int32_t>(in_c)});
              else
                map->push_back({img * in_img + (static_cast<std::int64_t>(wi) * H + hi) * in_c,
                                b_off, static_cast<std::int32_t>(in_c)});
            }
          }
        }
      }
    }
    im2col_cache.emplace(n, map);
    return im2col_cache[n];
  }

  Var<S> forward(const Var<S>& x) const {
    const Eigen::Index n = x.cols();
    require(x.rows() == static_cast<Eigen::Index>(H) * W_img * in_c,
            ErrorCode::shape_mismatch, "Conv2d: input feature size mismatch");
    const Eigen::Index kkc = static_cast<Eigen::Index>(k) * k * in_c;
    const Eigen::Index out_cols = static_cast<Eigen::Index>(Ho) * Wo * n;
    Var<S> patches = gather_runs(x, im2col_map(n), kkc, out_cols);
    Var<S> y = add(matmul(W, patches), broadcast_cols(b, out_cols));
    // (out_c x Ho*Wo*n) storage equals the image layout; only the shape changes.
    return reshape(y, static_cast<Eigen::Index>(Ho) * Wo * out_c, n);
  }
};

// Per-channel batch normalization over batch and spatial positions.
template <typename S>
struct BatchNorm2d {
  int channels = 0;
  S eps = static_cast<S>(1e-5);
  S momentum = static_cast<S>(0.9);
  Var<S> gamma, beta;
  MatX<S> running_mean, running_var;

  BatchNorm2d() = default;
  BatchNorm2d(ParamStore<S>& store, const std::string& prefix, int channels_, Rng& rng)
      : channels(channels_) {
    gamma = store.add(prefix + ".gamma", init_normal<S>(channels, 1, 0.02, rng).array() + S(1));
    beta = store.add(prefix + ".beta", MatX<S>::Zero(channels, 1));
    running_mean = MatX<S>::Zero(channels, 1);
    running_var = MatX<S>::Ones(channels, 1);
  }

  Var<S> forward(const Var<S>& x, bool train) {
    const Eigen::Index n = x.cols();
    const Eigen::Index pix = x.rows() / channels;
    const Eigen::Index cols = pix * n;
    Var<S> xr = reshape(x, channels, cols);
    Var<S> xn;
    if (train) {
      Var<S> mu = scale(rowwise_sum(xr), S(1) / static_cast<S>(cols));
      Var<S> xc = sub(xr, broadcast_cols(mu, cols));
      Var<S> var = scale(rowwise_sum(square(xc)), S(1) / static_cast<S>(cols));
      Var<S> inv = reciprocal(sqrt_(add_scalar(var, eps)));
      xn = mul(xc, broadcast_cols(inv, cols));
      const double unbias = cols > 1 ? static_cast<double>(cols) / (cols - 1) : 1.0;
      running_mean = momentum * running_mean + (S(1) - momentum) * mu.value();
      running_var =
          momentum * running_var + (S(1) - momentum) * static_cast<S>(unbias) * var.value();
    } else {
      MatX<S> inv = (running_var.array() + eps).sqrt().inverse();
      Var<S> xc = sub(xr, broadcast_cols(constant<S>(MatX<S>(running_mean)), cols));
      xn = mul(xc, broadcast_cols(constant<S>(std::move(inv)), cols));
    }
    Var<S> y = add(mul(xn, broadcast_cols(gamma, cols)), broadcast_cols(beta, cols));
    return reshape(y, x.rows(), n);
  }
};

// Layer normalization over all features of each example, per-channel affine.
template <typename S>
struct LayerNormCh {
  int channels = 0;
  S eps = static_cast<S>(1e-5);
  Var<S> gamma, beta;

  LayerNormCh() = default;
  LayerNormCh(ParamStore<S>& store, const std::string& prefix, int channels_)
      : channels(channels_) {
    gamma = store.add(prefix + ".gamma", MatX<S>::Ones(channels, 1));
    beta = store.add(prefix + ".beta", MatX<S>::Zero(channels, 1));
  }

  Var<S> forward(const Var<S>& x) const {
    const Eigen::Index d = x.rows(), n = x.cols();
    Var<S> mu = scale(colwise_sum(x), S(1) / static_cast<S>(d));
    Var<S> xc = sub(x, broadcast_rows(mu, d));
    Var<S> var = scale(colwise_sum(square(xc)), S(1) / static_cast<S>(d));
    Var<S> inv = reciprocal(sqrt_(add_scalar(var, eps)));
    Var<S> xn = mul(xc, broadcast_rows(inv, d));
    const Eigen::Index pix = d / channels;
    Var<S> xr = reshape(xn, channels, pix * n);
    Var<S> y = add(mul(xr, broadcast_cols(gamma, pix * n)),
                   broadcast_cols(beta, pix * n));
    return reshape(y, d, n);
  }
};

// Inverted dropout from an explicit RNG stream; scaling keeps expectations
// unchanged so the layer can stay active at sampling time.
template <typename S>
Var<S> dropout(const Var<S>& x, double p, Rng& rng) {
  if (p <= 0.0) return x;
  const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
  MatX<S> mask(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      mask(i, j) = rng.uniform() < p ? S(0) : keep_scale;
  return cmul(x, std::move(mask));
}

// Nearest-neighbour 2x upsampling. Maps are cached per geometry.
template <typename S>
Var<S> upsample2x(const Var<S>& x, int H, int W_img, int C) {
  const Eigen::Index n = x.cols();
  const std::int64_t in_img = static_cast<std::int64_t>(H) * W_img * C;
  const std::int64_t out_img = in_img * 4;

  thread_local std::map<std::tuple<int, int, int, Eigen::Index>, RunMapPtr> cache;
  const auto key = std::make_tuple(H, W_img, C, n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto map = std::make_shared<RunMap>();
    map->reserve(static_cast<std::size_t>(n) * H * W_img * 4);
    for (Eigen::Index img = 0; img < n; ++img)
      for (int wo = 0; wo < 2 * W_img; ++wo)
        for (int ho = 0; ho < 2 * H; ++ho)
          map->push_back({img * in_img + (static_cast<std::int64_t>(wo / 2) * H + ho / 2) * C,
                          img * out_img + (static_cast<std::int64_t>(wo) * 2 * H + ho) * C,
                          static_cast<std::int32_t>(C)});
    it = cache.emplace(key, std::move(map)).first;
  }
  return gather_runs(x, it->second, out_img, n);
}

// 2x2 max pooling (stride 2); the argmax map is data-dependent and treated as
// constant for differentiation, like a ReLU mask.
template <typename S>
Var<S> maxpool2x2(const Var<S>& x, int H, int W_img, int C) {
  const Eigen::Index n = x.cols();
  const int Ho = H / 2, Wo = W_img / 2;
  const std::int64_t in_img = static_cast<std::int64_t>(H) * W_img * C;
  const std::int64_t out_img = static_cast<std::int64_t>(Ho) * Wo * C;
  auto map = std::make_shared<RunMap>();
  map->reserve(static_cast<std::size_t>(n) * out_img);
  const S* data = x.value().data();
  for (Eigen::Index img = 0; img < n; ++img) {
    const std::int64_t base = img * in_img;
    for (int wo = 0; wo < Wo; ++wo)
      for (int ho = 0; ho < Ho; ++ho)
        for (int c = 0; c < C; ++c) {
          std::int64_t best = -1;
          S best_v = std::numeric_limits<S>::lowest();
          for (int dw = 0; dw < 2; ++dw)
            for (int dh = 0; dh < 2; ++dh) {
              const std::int64_t idx =
                  base + (static_cast<std::int64_t>(2 * wo + dw) * H + 2 * ho + dh) * C + c;
              if (data[idx] > best_v) {
                best_v = data[idx];
                best = idx;
              }
            }
          map->push_back(
              {best, img * out_img + (static_cast<std::int64_t>(wo) * Ho + ho) * C + c, 1});
        }
  }
  return gather_runs(x, std::move(map), out_img, n);
}

template <typename S>
struct Lstm {
  int in_dim = 0, hidden = 0;
  Var<S> Wx, Wh, b;  // (4h x in), (4h x h), (4h x 1); gate order i, f, g, o

  Lstm() = default;
  Lstm(ParamStore<S>& store, const std::string& prefix, int in_dim_, int hidden_, Rng& rng)
      : in_dim(in_dim_), hidden(hidden_) {
    Wx = store.add(prefix + ".Wx",
                   init_glorot<S>(4 * hidden, in_dim, in_dim, hidden, rng));
    Wh = store.add(prefix + ".Wh",
                   init_glorot<S>(4 * hidden, hidden, hidden, hidden, rng));
    MatX<S> bias = MatX<S>::Zero(4 * hidden, 1);
    bias.block(hidden, 0, hidden, 1).setOnes();  // forget-gate bias 1
    b = store.add(prefix + ".b", std::move(bias));
  }

  // Final hidden state after consuming the steps in order.
  Var<S> forward_final(const std::vector<Var<S>>& steps) const {
    const Eigen::Index n = steps.front().cols();
    Var<S> h = constant<S>(MatX<S>::Zero(hidden, n));
    Var<S> c = constant<S>(MatX<S>::Zero(hidden, n));
    for (const Var<S>& x : steps) {
      Var<S> z = add(add(matmul(Wx, x), matmul(Wh, h)), broadcast_cols(b, n));
      Var<S> i = sigmoid(slice_rows(z, 0, hidden));
      Var<S> f = sigmoid(slice_rows(z, hidden, hidden));
      Var<S> g = tanh_(slice_rows(z, 2 * hidden, hidden));
      Var<S> o = sigmoid(slice_rows(z, 3 * hidden, hidden));
      c = add(mul(f, c), mul(i, g));
      h = mul(o, tanh_(c));
    }
    return h;
  }
};

// Channel-axis concatenation of two images with the same pixel grid:
// out[pix*(Ca+Cb) + c] takes a's channels first, then b's. Maps cached per
// geometry.
template <typename S>
Var<S> concat_channels(const Var<S>& a, const Var<S>& b, std::int64_t pixels, int ca,
                       int cb) {
  const Eigen::Index n = a.cols();
  require(b.cols() == n, ErrorCode::shape_mismatch, "concat_channels: batch mismatch");
  require(a.rows() == pixels * ca && b.rows() == pixels * cb, ErrorCode::shape_mismatch,
          "concat_channels: feature size mismatch");
  thread_local std::map<std::tuple<std::int64_t, int, int, Eigen::Index, int>, RunMapPtr>
      cache;
  const std::int64_t cc = ca + cb;
  auto map_for = [&](int side, int c_side, std::int64_t c_shift) {
    const auto key = std::make_tuple(pixels, ca, cb, n, side);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto map = std::make_shared<RunMap>();
    map->reserve(static_cast<std::size_t>(n) * pixels);
    // scatter semantics: a_off is the (pixels*cc x n) output, b_off the input
    for (Eigen::Index img = 0; img < n; ++img)
      for (std::int64_t p = 0; p < pixels; ++p)
        map->push_back({img * pixels * cc + p * cc + c_shift,
                        img * pixels * c_side + p * c_side,
                        static_cast<std::int32_t>(c_side)});
    return cache.emplace(key, std::move(map)).first->second;
  };
  return add(scatter_runs(a, map_for(0, ca, 0), pixels * cc, n),
             scatter_runs(b, map_for(1, cb, ca), pixels * cc, n));
}

// Numerically stable softmax over rows of each column.
template <typename S>
Var<S> softmax_cols(const Var<S>& logits) {
  MatX<S> maxes = logits.value().colwise().maxCoeff();
  Var<S> z = sub(logits, broadcast_rows(constant<S>(std::move(maxes)), logits.rows()));
  Var<S> e = exp_(z);
  return mul(e, broadcast_rows(reciprocal(colwise_sum(e)), logits.rows()));
}

// Mean negative log-likelihood of the target rows.
template <typename S>
Var<S> cross_entropy_loss(const Var<S>& logits, const std::vector<int>& labels) {
  const Eigen::Index K = logits.rows(), n = logits.cols();
  require(static_cast<Eigen::Index>(labels.size()) == n, ErrorCode::shape_mismatch,
          "cross_entropy_loss: label count mismatch");
  MatX<S> maxes = logits.value().colwise().maxCoeff();
  Var<S> z = sub(logits, broadcast_rows(constant<S>(std::move(maxes)), K));
  Var<S> lse = log_(colwise_sum(exp_(z)));
  Var<S> logp = sub(z, broadcast_rows(lse, K));
  auto map = std::make_shared<RunMap>();
  map->reserve(n);
  for (Eigen::Index j = 0; j < n; ++j) map->push_back({j * K + labels[j], j, 1});
  Var<S> picked = gather_runs(logp, std::move(map), 1, n);
  return scale(rowwise_sum(picked), S(-1) / static_cast<S>(n));
}

}  // namespace melaug::nn
