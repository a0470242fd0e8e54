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

#include "melaug/crnn/model.hpp"
#include "melaug/dsp/norm.hpp"
#include "melaug/eval/fid.hpp"
#include "melaug/gan/train.hpp"

namespace melaug::eval {

struct FidTrendPoint {
  std::int64_t iteration = 0;
  double fid = 0.0;
};

// FID of each checkpoint's samples against a fixed real feature set. The
// conditioning columns and every sampling random stream are keyed only by
// (seed, chunk), never by the checkpoint, so points are comparable along the
// trend. `load(k)` returns (iteration, generator) for checkpoint k.
template <typename S, typename LoadGenerator>
std::vector<FidTrendPoint> fid_trend(std::size_t n_checkpoints, LoadGenerator&& load,
                                     const Eigen::MatrixXd& real_features,
                                     const nn::MatX<S>& cond_pool, int n_samples,
                                     crnn::CrnnNet<S>& feature_net,
                                     const dsp::NormStats& spec_stats,
                                     const dsp::NormStats& clf_stats,
                                     std::uint64_t seed, bool sample_dropout = true) {
  require(n_checkpoints >= 1, ErrorCode::invalid_argument,
          "fid_trend: need at least one checkpoint");
  require(cond_pool.cols() > 0 && n_samples > 0, ErrorCode::invalid_argument,
          "fid_trend: empty conditioning source");

  Rng pick_rng = Rng::stream(seed, "fid_trend_cond");
  std::vector<Eigen::Index> pick(n_samples);
  for (int i = 0; i < n_samples; ++i)
    pick[i] = static_cast<Eigen::Index>(pick_rng.uniform_int(0, cond_pool.cols() - 1));

  constexpr int kChunk = 32;
  std::vector<FidTrendPoint> out;
  for (std::size_t k = 0; k < n_checkpoints; ++k) {
    auto [iteration, generator] = load(k);
    Eigen::MatrixXd feats(feature_net.arch.feature_dim(), n_samples);
    for (int at = 0; at < n_samples; at += kChunk) {
      const int len = std::min(kChunk, n_samples - at);
      nn::MatX<S> conds(cond_pool.rows(), len);
      for (int j = 0; j < len; ++j) conds.col(j) = cond_pool.col(pick[at + j]);
      nn::MatX<S> pm1 = gan::sample_generator(
          *generator, conds,
          Rng::stream(seed, "fid_trend_sample", static_cast<std::uint64_t>(at)).next_u64(),
          sample_dropout);
      nn::MatX<S> db = dsp::invert_minmax_values<S>(pm1, spec_stats, dsp::SpecDomain::norm_pm1);
      nn::MatX<S> x01 = dsp::apply_minmax_values<S>(db, clf_stats, dsp::SpecDomain::norm_01);
      feats.middleCols(at, len) = feature_net.extract_features(x01).template cast<double>();
    }
    out.push_back({iteration, fid(real_features, feats)});
  }
  return out;
}

}  // namespace melaug::eval
