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
#include <unordered_map>
#include <vector>

#include "melaug/core/error.hpp"

namespace melaug::data {

struct LabeledExample {
  std::string id;
  std::string path;
  std::string label;
  std::string split;  // "", "train", "val" or "test"
  double duration = 0.0;
  bool synthetic = false;
};

struct DatasetManifest {
  std::vector<std::string> class_names;  // fixed order; persisted in the header line
  std::uint64_t seed = 0;
  std::vector<LabeledExample> examples;

  int class_index(const std::string& label) const {
    for (std::size_t i = 0; i < class_names.size(); ++i)
      if (class_names[i] == label) return static_cast<int>(i);
    fail(ErrorCode::invalid_argument, "unknown class label: " + label);
  }

  int count(const std::string& split, const std::string& label) const {
    int n = 0;
    for (const auto& e : examples)
      if (e.split == split && e.label == label) ++n;
    return n;
  }
};

// JSON-lines persistence: a header record with class order and seed, then one
// record per example.
void save_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& path);

struct SplitRatios {
  double train = 0.64;
  double val = 0.16;
  double test = 0.20;
};

// Stratified per class, deterministic under the seed. Examples already tagged
// "test" are never resampled; the remaining examples are distributed over the
// requested ratios (renormalized over train/val when an external test split
// exists). Per-class counts land within one example of the exact quota.
void split_examples(DatasetManifest& manifest, const SplitRatios& ratios,
                    std::uint64_t seed);

// Fold index per train-split example id; every train example lands in exactly
// one of the k validation folds, stratified per class.
std::unordered_map<std::string, int> kfold_assignments(const DatasetManifest& manifest,
                                                       int k, std::uint64_t seed);

// Randomly keeps ceil((1-drop_fraction) * n) train examples of the target
// class and removes the rest from the manifest; val/test are untouched.
void simulate_imbalance(DatasetManifest& manifest, const std::string& target_class,
                        double drop_fraction, std::uint64_t seed);

}  // namespace melaug::data
