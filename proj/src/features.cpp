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

#include <fstream>

#include <json.hpp>

#include "melaug/data/features.hpp"
#include "melaug/nn/serialize.hpp"

namespace melaug::data {

void save_feature_set(const std::string& path, const FeatureSet& fs) {
  require(fs.spec_db.cols() == static_cast<Eigen::Index>(fs.ids.size()) &&
              fs.f0_hz.cols() == fs.spec_db.cols() &&
              fs.labels.size() == fs.ids.size(),
          ErrorCode::invalid_argument, "save_feature_set: inconsistent sizes");
  nn::BlobWriter blob(path);
  Eigen::MatrixXf labels(1, static_cast<Eigen::Index>(fs.labels.size()));
  for (std::size_t i = 0; i < fs.labels.size(); ++i)
    labels(0, static_cast<Eigen::Index>(i)) = static_cast<float>(fs.labels[i]);
  blob.add<float>("labels", labels);
  blob.add<float>("spec_db", fs.spec_db);
  blob.add<float>("f0_hz", fs.f0_hz);
  blob.finish();

  std::ofstream ids(path + ".ids");
  if (!ids) fail(ErrorCode::io, "cannot write id file for " + path);
  for (const auto& id : fs.ids) ids << id << "\n";
}

FeatureSet load_feature_set(const std::string& path) {
  nn::BlobReader blob(path);
  FeatureSet fs;
  fs.spec_db = blob.get<float>("spec_db");
  fs.f0_hz = blob.get<float>("f0_hz");
  const Eigen::MatrixXf labels = blob.get<float>("labels");
  fs.labels.resize(labels.cols());
  for (Eigen::Index i = 0; i < labels.cols(); ++i)
    fs.labels[static_cast<std::size_t>(i)] = static_cast<int>(labels(0, i));

  std::ifstream ids(path + ".ids");
  if (!ids) fail(ErrorCode::missing_file, "missing id file for " + path);
  std::string line;
  while (std::getline(ids, line))
    if (!line.empty()) fs.ids.push_back(line);
  require(static_cast<Eigen::Index>(fs.ids.size()) == fs.spec_db.cols(),
          ErrorCode::parse, "feature id count mismatch for " + path);
  return fs;
}

void save_norm_stats(const std::string& path, const dsp::NormStats& stats) {
  nlohmann::json j{{"min_value", stats.min_value},
                   {"max_value", stats.max_value},
                   {"domain_tag", stats.domain_tag}};
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write norm stats: " + path);
  out << j.dump(2) << "\n";
}

dsp::NormStats load_norm_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::missing_file, "cannot open norm stats: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::parse, "bad norm stats json: " + path + ": " + e.what());
  }
  dsp::NormStats stats;
  stats.min_value = j.at("min_value").get<double>();
  stats.max_value = j.at("max_value").get<double>();
  stats.domain_tag = j.at("domain_tag").get<std::string>();
  require(stats.valid(), ErrorCode::parse, "degenerate norm stats in " + path);
  return stats;
}

}  // namespace melaug::data
