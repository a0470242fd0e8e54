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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "melaug/crnn/train.hpp"
#include "melaug/data/toy.hpp"
#include "melaug/dsp/mel.hpp"
#include "melaug/dsp/norm.hpp"

using namespace melaug;
using namespace melaug::crnn;
using Mf = nn::MatX<float>;

namespace {

CrnnArch tiny_arch() {
  CrnnArch arch;
  arch.image_size = 128;
  arch.channels = {4, 8, 8, 16};
  arch.hidden_size = 16;
  return arch;
}

Mf random_batch(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Mf x(128 * 128, n);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x.data()[i] = static_cast<float>(rng.uniform(0.0, 1.0));
  return x;
}

// Toy-corpus features in the classifier's [0,1] domain.
struct ToyFeatures {
  Mf x;
  std::vector<int> y;
};

ToyFeatures toy_features(int per_class, std::uint64_t seed) {
  const dsp::DspConfig dsp_cfg;
  data::ToyConfig toy_cfg;
  ToyFeatures out;
  out.x.resize(128 * 128, 3 * per_class);
  const auto fb = dsp::mel_filterbank<float>(dsp_cfg);
  Eigen::Index col = 0;
  for (int cls = 0; cls < 3; ++cls)
    for (int i = 0; i < per_class; ++i, ++col) {
      auto clip = data::synth_toy_clip(cls, i, seed, toy_cfg);
      auto db = dsp::to_db(dsp::mel_spectrogram<float>(clip, dsp_cfg, &fb), dsp_cfg);
      out.x.col(col) =
          Eigen::Map<const Eigen::VectorXf>(db.values.data(), db.values.size());
      out.y.push_back(cls);
    }
  const auto stats = dsp::fit_minmax<float>(out.x, "db");
  out.x = dsp::apply_minmax_values<float>(out.x, stats, dsp::SpecDomain::norm_01);
  return out;
}

}  // namespace

TEST_CASE("probability rows sum to one for random parameters and inputs") {
  for (std::uint64_t seed : {1, 2, 3}) {
    CrnnNet<float> net(tiny_arch(), seed);
    Mf x = random_batch(5, seed + 10);
    nn::Var<float> probs = net.probabilities(nn::constant<float>(Mf(x)));
    CHECK(probs.rows() == 3);
    CHECK(probs.cols() == 5);
    for (Eigen::Index j = 0; j < probs.cols(); ++j)
      CHECK(std::abs(probs.value().col(j).sum() - 1.0f) < 1e-6f);
    CHECK(probs.value().minCoeff() >= 0.0f);
    CHECK(probs.value().maxCoeff() <= 1.0f);
  }
}

TEST_CASE("zero head parameters give the uniform distribution") {
  CrnnNet<float> net(tiny_arch(), 5);
  net.params.find("head.W").node()->value.setZero();
  net.params.find("head.b").node()->value.setZero();
  nn::Var<float> probs = net.probabilities(nn::constant<float>(random_batch(4, 6)));
  CHECK((probs.value().array() - 1.0f / 3.0f).abs().maxCoeff() < 1e-6f);
}

TEST_CASE("batch of eight yields eight three-way predictions") {
  CrnnNet<float> net(tiny_arch(), 7);
  nn::Var<float> probs = net.probabilities(nn::constant<float>(random_batch(8, 8)));
  CHECK(probs.cols() == 8);
  CHECK(net.predict(random_batch(8, 8)).size() == 8);
}

TEST_CASE("predict breaks ties toward the lowest class index") {
  Mf probs(3, 3);
  probs.col(0) << 0.1f, 0.7f, 0.2f;
  probs.col(1) << 1.0f / 3, 1.0f / 3, 1.0f / 3;
  probs.col(2) << 0.4f, 0.4f, 0.2f;
  auto picks = CrnnNet<float>::predict_from_probabilities(probs);
  CHECK(picks[0] == 1);
  CHECK(picks[1] == 0);  // exact three-way tie
  CHECK(picks[2] == 0);  // two-way tie
}

TEST_CASE("argmax is invariant under strictly monotone logit transforms") {
  CrnnNet<float> net(tiny_arch(), 9);
  Mf x = random_batch(6, 10);
  nn::Var<float> logits = net.logits(nn::constant<float>(Mf(x)));
  Mf transformed = (logits.value() * 2.0f).array() + 1.0f;

  auto base = CrnnNet<float>::predict_from_probabilities(
      nn::softmax_cols(nn::constant<float>(Mf(logits.value()))).value());
  auto moved = CrnnNet<float>::predict_from_probabilities(
      nn::softmax_cols(nn::constant<float>(std::move(transformed))).value());
  CHECK(base == moved);
}

TEST_CASE("extract_features has the penultimate block's channel count") {
  CrnnArch arch;  // default topology: channels 16-32-64-128
  CHECK(arch.feature_dim() == 64);
  CrnnNet<float> net(tiny_arch(), 11);
  Mf x = random_batch(4, 12);
  Mf feats = net.extract_features(x);
  CHECK(feats.rows() == 8);  // penultimate block of the reduced topology
  CHECK(feats.cols() == 4);

  // duplicate inputs produce identical rows; repeated calls are deterministic
  Mf pair(128 * 128, 2);
  pair.col(0) = x.col(0);
  pair.col(1) = x.col(0);
  Mf f2 = net.extract_features(pair);
  CHECK((f2.col(0) - f2.col(1)).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((net.extract_features(x) - feats).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("zero input with zero biases maps to zero features") {
  CrnnNet<float> net(tiny_arch(), 13);  // conv biases initialize to zero
  Mf zeros = Mf::Zero(128 * 128, 2);
  CHECK(net.extract_features(zeros).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("early stopper stops after patience non-improving epochs") {
  EarlyStopper stopper(3);
  CHECK(stopper.observe(1, 0.5));
  const double vals[] = {0.4, 0.3, 0.2, 0.1, 0.05};
  int stopped_at = 0;
  for (int epoch = 2; epoch <= 6; ++epoch) {
    CHECK_FALSE(stopper.observe(epoch, vals[epoch - 2]));
    if (stopper.should_stop(epoch)) {
      stopped_at = epoch;
      break;
    }
  }
  CHECK(stopped_at == 5);  // four epochs past the best
  CHECK(stopper.best_epoch() == 1);
  CHECK(stopper.best_metric() == 0.5);
}

TEST_CASE("training separates the toy classes and replays deterministically") {
  ToyFeatures train = toy_features(20, 77);
  ToyFeatures val = toy_features(6, 78);

  ClassifierTrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 16;
  cfg.patience = 16;
  cfg.batch_size = 12;
  cfg.seed = 5;

  CrnnNet<float> net(tiny_arch(), 5);
  TrainResult result = train_classifier<float>(net, train.x, train.y, val.x, val.y, cfg);
  REQUIRE(!result.history.empty());

  // train accuracy on the separable toy data
  auto preds = net.predict(train.x);
  int hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == train.y[i]) ++hits;
  CHECK(static_cast<double>(hits) / preds.size() > 0.9);

  // determinism: identical history under the same seed
  CrnnNet<float> net2(tiny_arch(), 5);
  TrainResult result2 = train_classifier<float>(net2, train.x, train.y, val.x, val.y, cfg);
  REQUIRE(result.history.size() == result2.history.size());
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    CHECK(result.history[i].train_loss == result2.history[i].train_loss);
    CHECK(result.history[i].val_loss == result2.history[i].val_loss);
    CHECK(result.history[i].val_uar == result2.history[i].val_uar);
  }
}

TEST_CASE("loss decreases over the first epochs for most seeds") {
  ToyFeatures train = toy_features(10, 99);
  ToyFeatures val = toy_features(3, 100);
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ClassifierTrainConfig cfg;
    cfg.learning_rate = 2e-4;
    cfg.max_epochs = 5;
    cfg.patience = 5;
    cfg.batch_size = 10;
    cfg.seed = seed;
    CrnnNet<float> net(tiny_arch(), seed);
    TrainResult result = train_classifier<float>(net, train.x, train.y, val.x, val.y, cfg);
    if (result.history.back().train_loss < result.history.front().train_loss) ++improved;
  }
  CHECK(improved >= 4);
}

TEST_CASE("augment hook sees minority batches and labels pass through") {
  ToyFeatures train = toy_features(6, 55);
  ToyFeatures val = toy_features(2, 56);
  ClassifierTrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.batch_size = 6;
  cfg.seed = 3;

  int hook_calls = 0;
  std::vector<int> labels_seen;
  BatchAugmentHook<float> hook = [&](int, const std::vector<Eigen::Index>& ids,
                                     Mf& batch) {
    ++hook_calls;
    CHECK(batch.cols() == static_cast<Eigen::Index>(ids.size()));
    for (auto id : ids) labels_seen.push_back(train.y[static_cast<std::size_t>(id)]);
  };
  CrnnNet<float> net(tiny_arch(), 3);
  train_classifier<float>(net, train.x, train.y, val.x, val.y, cfg, hook);
  CHECK(hook_calls == 3);  // 18 examples / batch 6
  CHECK(labels_seen.size() == train.y.size());
}

TEST_CASE("empty splits and label mismatches are rejected") {
  CrnnNet<float> net(tiny_arch(), 1);
  Mf x = random_batch(4, 1);
  std::vector<int> y{0, 1, 2};  // wrong count
  ClassifierTrainConfig cfg;
  CHECK_THROWS_AS(train_classifier<float>(net, x, y, x, y, cfg), Error);
  Mf empty(128 * 128, 0);
  std::vector<int> none;
  CHECK_THROWS_AS(train_classifier<float>(net, empty, none, x, y, cfg), Error);
}
