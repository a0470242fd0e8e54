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

#include <filesystem>
#include <string>
#include <vector>

#include "melaug/data/features.hpp"
#include "melaug/data/manifest.hpp"
#include "melaug/dsp/f0.hpp"
#include "melaug/pipeline/config.hpp"

namespace melaug::pipeline {

struct Workspace {
  std::string root;

  std::string manifest_path() const { return root + "/manifest.jsonl"; }
  std::string audio_dir() const { return root + "/audio"; }
  std::string features_path(const std::string& split) const {
    return root + "/features/" + split + ".bin";
  }
  std::string stats_path(const std::string& name) const {
    return root + "/stats/" + name + ".json";
  }
  std::string snapshot_path() const { return root + "/config_snapshot.yaml"; }
  std::string gan_dir() const { return root + "/gan"; }
  std::string gan_log_path() const { return gan_dir() + "/train_log.tsv"; }
  std::string gan_ckpt_dir(std::int64_t iteration) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "ckpt_%08lld", static_cast<long long>(iteration));
    return gan_dir() + "/" + buf;
  }
  std::string gan_samples_dir() const { return root + "/gan_samples"; }
  std::string clf_dir(const std::string& mode) const { return root + "/clf_" + mode; }
  std::string fid_dir() const { return root + "/fid"; }
  std::string report_dir() const { return root + "/report"; }
};

inline void require_exists(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::missing_prerequisite, what + " not found: " + path +
                                              " (run the producing command first)");
}

inline void refuse_overwrite(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path))
    fail(ErrorCode::invalid_argument,
         path + " already exists; pass --force to overwrite");
}

// The class the augmentations target: the simulated-imbalance class when
// enabled, otherwise the class with the fewest train examples.
std::string minority_class(const ExperimentConfig& cfg,
                           const data::DatasetManifest& manifest);

// dB spectrogram columns -> [0,1] classifier domain.
Eigen::MatrixXf to_norm01(const Eigen::MatrixXf& spec_db, const dsp::NormStats& stats);

// Conditioning vectors (normalized log-F0 semitones) for the given columns.
Eigen::MatrixXf conditioning_vectors(const Eigen::MatrixXf& f0_hz,
                                     const std::vector<Eigen::Index>& cols,
                                     const dsp::NormStats& f0_stats);

std::vector<Eigen::Index> class_columns(const data::FeatureSet& fs, int class_idx);

}  // namespace melaug::pipeline
