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

#include <functional>
#include <vector>

#include "melaug/crnn/model.hpp"
#include "melaug/eval/metrics.hpp"
#include "melaug/nn/adam.hpp"

namespace melaug::crnn {

struct ClassifierTrainConfig {
  double learning_rate = 1e-5;
  int max_epochs = 30;
  int patience = 5;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

struct EpochRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_uar = 0.0;
};

struct TrainResult {
  std::vector<EpochRow> history;
  int best_epoch = 0;
  double best_val_uar = 0.0;
};

// Called once per batch before the forward pass; mutates batch columns in
// place (on-the-fly augmentation). `ids` are indices into the training set.
template <typename S>
using BatchAugmentHook =
    std::function<void(int epoch, const std::vector<Eigen::Index>& ids, MatX<S>& batch)>;

// Tracks a metric where larger is better; signals stop once the epochs since
// the best exceed the patience.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}
  // Returns true when this epoch is a new best.
  bool observe(int epoch, double metric) {
    if (best_epoch_ == 0 || metric > best_metric_) {
      best_metric_ = metric;
      best_epoch_ = epoch;
      return true;
    }
    return false;
  }
  bool should_stop(int epoch) const { return epoch - best_epoch_ > patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_metric() const { return best_metric_; }

 private:
  int patience_;
  int best_epoch_ = 0;
  double best_metric_ = 0.0;
};

template <typename S>
double validation_uar(CrnnNet<S>& net, const MatX<S>& x, const std::vector<int>& y,
                      int chunk, double* loss_out = nullptr) {
  nn::NoGradGuard ng;
  std::vector<int> preds;
  preds.reserve(y.size());
  double loss_sum = 0.0;
  for (Eigen::Index at = 0; at < x.cols(); at += chunk) {
    const Eigen::Index len = std::min<Eigen::Index>(chunk, x.cols() - at);
    MatX<S> block = x.middleCols(at, len);
    Var<S> logits = net.logits(nn::constant<S>(std::move(block)));
    if (loss_out) {
      std::vector<int> labels(y.begin() + at, y.begin() + at + len);
      loss_sum +=
          static_cast<double>(nn::cross_entropy_loss(logits, labels).scalar()) * len;
    }
    Var<S> probs = nn::softmax_cols(logits);
    for (int p : CrnnNet<S>::predict_from_probabilities(probs.value())) preds.push_back(p);
  }
  if (loss_out) *loss_out = loss_sum / static_cast<double>(x.cols());
  const auto cm = eval::confusion_matrix(y, preds, net.arch.num_classes);
  return eval::metrics_from_confusion(cm).uar;
}

// Cross-entropy training with Adam, per-epoch validation UAR, and
// best-checkpoint restoration under early stopping.
template <typename S>
TrainResult train_classifier(CrnnNet<S>& net, const MatX<S>& train_x,
                             const std::vector<int>& train_y, const MatX<S>& val_x,
                             const std::vector<int>& val_y,
                             const ClassifierTrainConfig& cfg,
                             const BatchAugmentHook<S>& augment = nullptr) {
  require(train_x.cols() > 0 && val_x.cols() > 0, ErrorCode::invalid_argument,
          "train_classifier: empty split");
  require(train_x.cols() == static_cast<Eigen::Index>(train_y.size()),
          ErrorCode::invalid_argument, "train_classifier: label count mismatch");

  nn::Adam<S> adam(net.params, cfg.learning_rate, 0.9, 0.999);
  EarlyStopper stopper(cfg.patience);
  TrainResult result;
  std::vector<nn::MatX<S>> best_params;

  const Eigen::Index n = train_x.cols();
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng shuffle_rng = Rng::stream(cfg.seed, "clf_shuffle", epoch);
    shuffle_rng.shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    for (Eigen::Index at = 0; at < n; at += cfg.batch_size) {
      const Eigen::Index len = std::min<Eigen::Index>(cfg.batch_size, n - at);
      MatX<S> batch(train_x.rows(), len);
      std::vector<int> labels(len);
      std::vector<Eigen::Index> ids(len);
      for (Eigen::Index j = 0; j < len; ++j) {
        ids[j] = order[at + j];
        batch.col(j) = train_x.col(ids[j]);
        labels[j] = train_y[ids[j]];
      }
      if (augment) augment(epoch, ids, batch);
      Var<S> loss = nn::cross_entropy_loss(net.logits(nn::constant<S>(std::move(batch))),
                                           labels);
      loss_sum += static_cast<double>(loss.scalar()) * len;
      auto grads = nn::backward(loss, net.params.vars());
      adam.step(grads, net.params);
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(n);
    row.val_uar = validation_uar(net, val_x, val_y, cfg.batch_size, &row.val_loss);
    require(std::isfinite(row.train_loss), ErrorCode::numerical,
            "train_classifier: non-finite loss at epoch " + std::to_string(epoch));
    result.history.push_back(row);

    if (stopper.observe(epoch, row.val_uar)) {
      best_params.clear();
      for (const auto& [name, v] : net.params.entries()) best_params.push_back(v.value());
    }
    if (stopper.should_stop(epoch)) break;
  }

  if (!best_params.empty()) {
    const auto& entries = net.params.entries();
    for (std::size_t i = 0; i < entries.size(); ++i)
      entries[i].second.node()->value = best_params[i];
  }
  result.best_epoch = stopper.best_epoch();
  result.best_val_uar = stopper.best_metric();
  return result;
}

}  // namespace melaug::crnn
