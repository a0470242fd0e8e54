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

#include "melaug/core/rng.hpp"
#include "melaug/dsp/types.hpp"

namespace melaug::augment {

struct SpecAugmentPolicy {
  int F = 13;  // max frequency-mask width (mel bins)
  int T = 20;  // max time-mask width (frames)
  int n_freq_masks = 1;
  int n_time_masks = 1;
};

// Masks random frequency bands and time spans with the matrix mean. Mask
// widths are drawn uniformly from {0..F} / {0..T}, offsets uniformly over
// the valid range; deterministic for a fixed seed.
template <typename S>
dsp::MelSpectrogram<S> spec_augment(const dsp::MelSpectrogram<S>& spec,
                                    const SpecAugmentPolicy& policy,
                                    std::uint64_t rng_seed) {
  using dsp::SpecDomain;
  require(spec.domain == SpecDomain::db || spec.domain == SpecDomain::norm_01 ||
              spec.domain == SpecDomain::norm_pm1,
          ErrorCode::domain_mismatch, "spec_augment: input must be db or normalized");
  const Eigen::Index bands = spec.values.rows();
  const Eigen::Index frames = spec.values.cols();
  require(policy.F >= 0 && policy.F <= bands && policy.T >= 0 && policy.T <= frames &&
              policy.n_freq_masks >= 0 && policy.n_time_masks >= 0,
          ErrorCode::invalid_argument, "spec_augment: policy out of bounds");

  dsp::MelSpectrogram<S> out = spec;
  const S fill = spec.values.mean();
  Rng rng = Rng::stream(rng_seed, "spec_augment");
  for (int i = 0; i < policy.n_freq_masks; ++i) {
    const auto f = rng.uniform_int(0, policy.F);
    const auto f0 = rng.uniform_int(0, bands - f);
    if (f > 0) out.values.middleRows(f0, f).setConstant(fill);
  }
  for (int i = 0; i < policy.n_time_masks; ++i) {
    const auto t = rng.uniform_int(0, policy.T);
    const auto t0 = rng.uniform_int(0, frames - t);
    if (t > 0) out.values.middleCols(t0, t).setConstant(fill);
  }
  return out;
}

}  // namespace melaug::augment
