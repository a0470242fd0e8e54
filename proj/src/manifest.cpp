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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "melaug/core/rng.hpp"
#include "melaug/data/manifest.hpp"

namespace melaug::data {

using nlohmann::json;

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write manifest: " + path);
  json header{{"class_names", manifest.class_names}, {"seed", manifest.seed}};
  out << header.dump() << "\n";
  for (const auto& e : manifest.examples) {
    json row{{"id", e.id},       {"path", e.path},
             {"label", e.label}, {"split", e.split},
             {"duration", e.duration}, {"synthetic", e.synthetic}};
    out << row.dump() << "\n";
  }
  if (!out) fail(ErrorCode::io, "manifest write failed: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::missing_file, "cannot open manifest: " + path);
  DatasetManifest m;
  std::string line;
  int line_no = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const std::exception& e) {
      fail(ErrorCode::parse,
           "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1) {
      m.class_names = row.at("class_names").get<std::vector<std::string>>();
      m.seed = row.at("seed").get<std::uint64_t>();
      continue;
    }
    LabeledExample e;
    e.id = row.at("id").get<std::string>();
    e.path = row.at("path").get<std::string>();
    e.label = row.at("label").get<std::string>();
    e.split = row.at("split").get<std::string>();
    e.duration = row.at("duration").get<double>();
    e.synthetic = row.value("synthetic", false);
    m.class_index(e.label);  // validates the label
    if (!ids.insert(e.id).second)
      fail(ErrorCode::parse, "manifest: duplicate example id " + e.id);
    m.examples.push_back(std::move(e));
  }
  require(!m.class_names.empty(), ErrorCode::parse, "manifest: missing header line");
  return m;
}

namespace {

// Largest-remainder apportionment of n across the ratios.
std::vector<int> quota_counts(int n, const std::vector<double>& ratios) {
  std::vector<int> counts(ratios.size());
  std::vector<std::pair<double, std::size_t>> rema;
  int assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double q = n * ratios[i];
    counts[i] = static_cast<int>(std::floor(q + 1e-9));
    assigned += counts[i];
    rema.emplace_back(q - counts[i], i);
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < n - assigned; ++i) ++counts[rema[i % rema.size()].second];
  return counts;
}

}  // namespace

void split_examples(DatasetManifest& manifest, const SplitRatios& ratios,
                    std::uint64_t seed) {
  const double sum = ratios.train + ratios.val + ratios.test;
  require(std::abs(sum - 1.0) < 1e-9, ErrorCode::invalid_argument,
          "split: ratios must sum to 1");
  bool external_test = false;
  for (const auto& e : manifest.examples)
    if (e.split == "test") external_test = true;

  for (std::size_t c = 0; c < manifest.class_names.size(); ++c) {
    const std::string& cls = manifest.class_names[c];
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < manifest.examples.size(); ++i)
      if (manifest.examples[i].label == cls && manifest.examples[i].split != "test")
        idx.push_back(i);
    if (idx.empty()) continue;

    std::vector<double> parts;
    std::vector<const char*> names;
    if (external_test) {
      const double tv = ratios.train + ratios.val;
      require(tv > 0, ErrorCode::invalid_argument, "split: train+val ratio is zero");
      parts = {ratios.train / tv, ratios.val / tv};
      names = {"train", "val"};
    } else {
      parts = {ratios.train, ratios.val, ratios.test};
      names = {"train", "val", "test"};
    }
    const auto counts = quota_counts(static_cast<int>(idx.size()), parts);
    for (std::size_t s = 0; s < counts.size(); ++s)
      require(parts[s] == 0.0 || counts[s] > 0, ErrorCode::invalid_argument,
              "split: class " + cls + " has fewer examples than splits");

    Rng rng = Rng::stream(seed, "split", c);
    rng.shuffle(idx.begin(), idx.end());
    std::size_t at = 0;
    for (std::size_t s = 0; s < counts.size(); ++s)
      for (int i = 0; i < counts[s]; ++i)
        manifest.examples[idx[at++]].split = names[s];
  }
}

std::unordered_map<std::string, int> kfold_assignments(const DatasetManifest& manifest,
                                                       int k, std::uint64_t seed) {
  require(k >= 2, ErrorCode::invalid_argument, "kfold: k must be >= 2");
  std::unordered_map<std::string, int> folds;
  for (std::size_t c = 0; c < manifest.class_names.size(); ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < manifest.examples.size(); ++i)
      if (manifest.examples[i].label == manifest.class_names[c] &&
          manifest.examples[i].split == "train")
        idx.push_back(i);
    Rng rng = Rng::stream(seed, "kfold", c);
    rng.shuffle(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i)
      folds[manifest.examples[idx[i]].id] = static_cast<int>(i % k);
  }
  return folds;
}

void simulate_imbalance(DatasetManifest& manifest, const std::string& target_class,
                        double drop_fraction, std::uint64_t seed) {
  require(drop_fraction >= 0.0 && drop_fraction < 1.0, ErrorCode::invalid_argument,
          "simulate_imbalance: drop_fraction must lie in [0, 1)");
  manifest.class_index(target_class);
  if (drop_fraction == 0.0) return;

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < manifest.examples.size(); ++i)
    if (manifest.examples[i].label == target_class && manifest.examples[i].split == "train")
      idx.push_back(i);
  require(!idx.empty(), ErrorCode::invalid_argument,
          "simulate_imbalance: no train examples of class " + target_class);

  const int keep =
      static_cast<int>(std::ceil((1.0 - drop_fraction) * static_cast<double>(idx.size())));
  Rng rng = Rng::stream(seed, "imbalance");
  rng.shuffle(idx.begin(), idx.end());
  std::set<std::size_t> drop(idx.begin() + keep, idx.end());

  std::vector<LabeledExample> kept;
  kept.reserve(manifest.examples.size() - drop.size());
  for (std::size_t i = 0; i < manifest.examples.size(); ++i)
    if (!drop.count(i)) kept.push_back(std::move(manifest.examples[i]));
  manifest.examples = std::move(kept);
}

}  // namespace melaug::data
