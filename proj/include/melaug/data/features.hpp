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

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "melaug/dsp/norm.hpp"

namespace melaug::data {

// Cached per-split features: dB-domain mel spectrogram columns (the
// column-major flat view of the 128x128 matrix) plus the raw F0 track.
struct FeatureSet {
  std::vector<std::string> ids;
  std::vector<int> labels;
  Eigen::MatrixXf spec_db;  // (bands*frames x n)
  Eigen::MatrixXf f0_hz;    // (frames x n)

  Eigen::Index size() const { return spec_db.cols(); }
};

void save_feature_set(const std::string& path, const FeatureSet& fs);
FeatureSet load_feature_set(const std::string& path);

// NormStats persist as a small JSON record; the decimal form round-trips
// bit-exactly.
void save_norm_stats(const std::string& path, const dsp::NormStats& stats);
dsp::NormStats load_norm_stats(const std::string& path);

}  // namespace melaug::data
