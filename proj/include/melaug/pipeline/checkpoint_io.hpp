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

#include "melaug/crnn/model.hpp"
#include "melaug/dsp/norm.hpp"
#include "melaug/gan/train.hpp"

namespace melaug::pipeline {

// Checkpoint container: a directory holding meta.json (iteration, config
// snapshot, normalization stats) and params.bin (one binary blob per named
// array: parameters, optimizer moments, batch-norm running stats).
// Round-trips are bit-exact.

struct GanCheckpointInfo {
  std::int64_t iteration = 0;
  gan::GanTrainConfig config;
  dsp::NormStats spec_stats;  // db -> [-1,1] stats used for GAN training data
  dsp::NormStats f0_stats;    // semitone min-max stats for conditioning vectors
};

void save_gan_checkpoint(const std::string& dir, gan::GanTrainer<float>& trainer,
                         const GanCheckpointInfo& info);
GanCheckpointInfo read_gan_checkpoint_info(const std::string& dir);
// Restores params, optimizer state, running stats and the iteration counter
// into a trainer built with the checkpoint's config.
void load_gan_checkpoint(const std::string& dir, gan::GanTrainer<float>& trainer);
// Generator-only load for sampling/evaluation.
void load_generator(const std::string& dir, gan::GeneratorNet<float>& generator);

struct CrnnCheckpointInfo {
  crnn::CrnnArch arch;
  std::vector<std::string> class_names;
  int best_epoch = 0;
  double best_val_uar = 0.0;
};

void save_crnn_checkpoint(const std::string& dir, const crnn::CrnnNet<float>& net,
                          const CrnnCheckpointInfo& info);
CrnnCheckpointInfo read_crnn_checkpoint_info(const std::string& dir);
void load_crnn_checkpoint(const std::string& dir, crnn::CrnnNet<float>& net);

// Checkpoint directories under a GAN training dir, sorted by iteration.
std::vector<std::pair<std::int64_t, std::string>> list_gan_checkpoints(
    const std::string& gan_dir);

}  // namespace melaug::pipeline
