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

#include "melaug/core/error.hpp"

namespace melaug::dsp {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class SpecDomain { power, db, norm_pm1, norm_01 };

inline const char* domain_name(SpecDomain d) {
  switch (d) {
    case SpecDomain::power: return "power";
    case SpecDomain::db: return "db";
    case SpecDomain::norm_pm1: return "norm_pm1";
    case SpecDomain::norm_01: return "norm_01";
  }
  return "?";
}

// Rows are mel bands, columns are time frames. The column-major flat view of
// `values` is the network image layout used throughout (band fastest).
template <typename S>
struct MelSpectrogram {
  MatX<S> values;
  SpecDomain domain = SpecDomain::power;
  std::string source_id;
};

// Frame-synchronous with MelSpectrogram columns; 0 marks unvoiced frames.
template <typename S>
struct F0Contour {
  VecX<S> hz;
  double frame_rate = 0.0;
};

// Normalized log-F0 contour in [0, 1]; the generator's conditioning input.
template <typename S>
struct ConditioningVector {
  VecX<S> values;
};

struct DspConfig {
  int sample_rate = 16000;
  int fft_size = 1024;
  int hop = 256;  // 16 ms at 16 kHz
  int mel_bands = 128;
  int frames = 128;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double db_floor = 1e-10;
  double db_range = 80.0;

  // The clip length that yields exactly `frames` windows with no padding.
  Eigen::Index clip_samples() const {
    return static_cast<Eigen::Index>(hop) * (frames - 1) + fft_size;
  }
};

struct F0Config {
  double fmin_hz = 50.0;
  double fmax_hz = 500.0;
  double voicing_threshold = 0.3;
};

}  // namespace melaug::dsp
