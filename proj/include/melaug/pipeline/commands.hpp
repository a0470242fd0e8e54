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

#include "melaug/pipeline/config.hpp"

namespace melaug::pipeline {

// Augmentation modes of the classifier training command; `gan` consumes the
// trained generator, the others are the reference baselines.
enum class AugmentationMode { none, specaugment, stretch, pitch, gan };

const char* augmentation_mode_name(AugmentationMode mode);
AugmentationMode augmentation_mode_from_name(const std::string& name);

void cmd_prepare_data(const ExperimentConfig& cfg, bool force);
void cmd_train_gan(const ExperimentConfig& cfg, bool force, bool resume,
                   std::optional<std::int64_t> iterations_override);
void cmd_sample_gan(const ExperimentConfig& cfg, int count,
                    const std::string& checkpoint_dir, bool force);
void cmd_train_classifier(const ExperimentConfig& cfg, AugmentationMode mode, bool force);
void cmd_evaluate(const ExperimentConfig& cfg, const std::string& mode_or_all);
void cmd_fid(const ExperimentConfig& cfg, bool trend, bool force);
void cmd_report(const ExperimentConfig& cfg, bool force);

}  // namespace melaug::pipeline
