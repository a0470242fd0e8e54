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

#include <optional>
#include <string>
#include <vector>

#include "melaug/augment/spec_augment.hpp"
#include "melaug/crnn/train.hpp"
#include "melaug/data/toy.hpp"
#include "melaug/dsp/types.hpp"
#include "melaug/gan/train.hpp"

namespace melaug::pipeline {

struct CorpusSource {
  std::string path;      // directory of wav files
  std::string label;     // class assigned to every file in the directory
  std::string segments;  // optional segments file applied to the recordings
};

struct DatasetConfig {
  std::string mode = "toy";  // toy | corpus
  std::vector<std::string> class_names{"english", "hindi", "hindi-english"};
  data::ToyConfig toy;
  std::vector<CorpusSource> sources;
  data::SplitRatios split;
  bool imbalance_enabled = true;
  std::string imbalance_class = "hindi-english";
  double imbalance_drop_fraction = 0.8;
  // 0 = balance the minority up to the majority-class train count
  int balance_target = 0;
  double trim_threshold_db = 40.0;
};

struct AugmentConfig {
  augment::SpecAugmentPolicy spec;
  double stretch_min = 0.5;
  double stretch_max = 1.5;
  int pitch_min = -4;
  int pitch_max = 4;
};

struct ClassifierConfig {
  crnn::CrnnArch arch;
  crnn::ClassifierTrainConfig train;
};

struct EvaluationConfig {
  std::vector<int> fid_sample_sizes{500, 1000, 2000, 2400};
  int fid_trend_samples = 2400;
  // augmentation mode whose trained classifier supplies FID features
  std::string feature_mode = "none";
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  DatasetConfig dataset;
  dsp::DspConfig dsp;
  dsp::F0Config f0;
  AugmentConfig augment;
  gan::GanTrainConfig gan;
  ClassifierConfig classifier;
  EvaluationConfig evaluation;
};

// Strict parse: unknown keys anywhere in the tree are a config error.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_yaml(const ExperimentConfig& cfg);

}  // namespace melaug::pipeline
