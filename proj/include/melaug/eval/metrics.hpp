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

#include "melaug/core/error.hpp"

namespace melaug::eval {

struct ConfusionMatrix {
  Eigen::MatrixXi counts;  // rows = true class, columns = predicted class
  std::vector<std::string> class_names;

  int total() const { return counts.sum(); }
};

inline ConfusionMatrix confusion_matrix(const std::vector<int>& truth,
                                        const std::vector<int>& predicted, int k) {
  require(truth.size() == predicted.size(), ErrorCode::invalid_argument,
          "confusion_matrix: length mismatch");
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 0 && truth[i] < k && predicted[i] >= 0 && predicted[i] < k,
            ErrorCode::invalid_argument, "confusion_matrix: label out of range");
    ++cm.counts(truth[i], predicted[i]);
  }
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double uar = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::vector<std::string> class_names;
};

// One-vs-rest multiclass reduction; accuracy is trace/total, UAR the
// unweighted mean of per-class recalls, and any 0/0 ratio is defined as 0.
inline MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
  const int total = cm.total();
  require(total > 0, ErrorCode::invalid_argument, "metrics_from_confusion: empty matrix");
  const int k = static_cast<int>(cm.counts.rows());
  MetricsReport report;
  report.class_names = cm.class_names;
  report.accuracy = static_cast<double>(cm.counts.trace()) / total;
  double recall_sum = 0.0, f1_sum = 0.0;
  for (int c = 0; c < k; ++c) {
    const double tp = cm.counts(c, c);
    const double fp = cm.counts.col(c).sum() - tp;
    const double fn = cm.counts.row(c).sum() - tp;
    ClassMetrics m;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    recall_sum += m.recall;
    f1_sum += m.f1;
    report.per_class.push_back(m);
  }
  report.uar = recall_sum / k;
  report.macro_f1 = f1_sum / k;
  return report;
}

}  // namespace melaug::eval
