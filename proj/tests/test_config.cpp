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

#include "melaug/pipeline/config.hpp"

using namespace melaug;
using namespace melaug::pipeline;

TEST_CASE("defaults carry the published hyperparameters") {
  ExperimentConfig cfg = parse_config("");
  CHECK(cfg.dsp.sample_rate == 16000);
  CHECK(cfg.dsp.fft_size == 1024);
  CHECK(cfg.dsp.hop == 256);
  CHECK(cfg.dsp.mel_bands == 128);
  CHECK(cfg.dsp.frames == 128);
  CHECK(cfg.dsp.clip_samples() == 33536);
  CHECK(cfg.dsp.fmax_hz == 8000.0);
  CHECK(cfg.dsp.db_range == 80.0);
  CHECK(cfg.f0.fmin_hz == 50.0);
  CHECK(cfg.f0.fmax_hz == 500.0);
  CHECK(cfg.f0.voicing_threshold == 0.3);

  CHECK(cfg.gan.lambda_gp == 10.0);
  CHECK(cfg.gan.lambda_recon == 10.0);
  CHECK(cfg.gan.learning_rate == 1e-4);
  CHECK(cfg.gan.adam_beta1 == 0.5);
  CHECK(cfg.gan.adam_beta2 == 0.9);
  CHECK(cfg.gan.batch_size == 8);
  CHECK(cfg.gan.iterations == 150000);
  CHECK(cfg.gan.critic_steps == 5);
  CHECK(cfg.gan.arch.dropout_p == 0.5);
  CHECK(cfg.gan.arch.leaky_relu_alpha == 0.2);
  CHECK(cfg.gan.arch.base_channels == 64);
  CHECK(cfg.gan.arch.stages == 5);
  CHECK(cfg.gan.arch.kernel_size == 5);
  CHECK(cfg.gan.arch.cond_dim == 128);
  CHECK(cfg.gan.sample_dropout);

  CHECK(cfg.augment.spec.F == 13);
  CHECK(cfg.augment.spec.T == 20);
  CHECK(cfg.augment.stretch_min == 0.5);
  CHECK(cfg.augment.stretch_max == 1.5);
  CHECK(cfg.augment.pitch_min == -4);
  CHECK(cfg.augment.pitch_max == 4);

  CHECK(cfg.classifier.train.learning_rate == 1e-5);
  CHECK(cfg.classifier.train.max_epochs == 30);
  CHECK(cfg.classifier.arch.channels == std::vector<int>{16, 32, 64, 128});
  CHECK(cfg.classifier.arch.hidden_size == 128);
  CHECK(cfg.classifier.arch.num_classes == 3);

  CHECK(cfg.dataset.class_names ==
        std::vector<std::string>{"english", "hindi", "hindi-english"});
  CHECK(cfg.dataset.imbalance_class == "hindi-english");
  CHECK(cfg.dataset.imbalance_drop_fraction == 0.8);
  CHECK(cfg.dataset.split.train == 0.64);
  CHECK(cfg.dataset.split.val == 0.16);
  CHECK(cfg.dataset.split.test == 0.2);

  CHECK(cfg.evaluation.fid_sample_sizes == std::vector<int>{500, 1000, 2000, 2400});
}

TEST_CASE("unknown keys are rejected at every depth") {
  CHECK_THROWS_WITH_AS(parse_config("bogus: 1\n"), doctest::Contains("unknown key"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_config("gan: {bogus: 1}\n"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(parse_config("dataset: {toy: {bogus: 1}}\n"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(parse_config("dsp: {f0: {bogus: 1}}\n"),
                       doctest::Contains("unknown key"), Error);
  try {
    parse_config("augment: {spec: {Q: 3}}\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
  }
}

TEST_CASE("invalid values and structures are config errors") {
  CHECK_THROWS_AS(parse_config("gan: {batch_size: banana}\n"), Error);
  CHECK_THROWS_AS(parse_config("dataset: {mode: magic}\n"), Error);
  CHECK_THROWS_AS(parse_config("dataset: {class_names: [a, b]}\n"), Error);
  CHECK_THROWS_AS(parse_config("gan: {image_size: 100}\n"), Error);  // vs mel_bands
  CHECK_THROWS_AS(parse_config("dsp: {mel_bands: 64}\n"), Error);  // vs gan image size
  CHECK_THROWS_AS(parse_config(": ::"), Error);
}

TEST_CASE("overrides apply and cross-links propagate") {
  ExperimentConfig cfg = parse_config(
      "seed: 99\n"
      "gan: {base_channels: 8, iterations: 2000}\n"
      "classifier: {channels: [4, 8, 8, 16]}\n");
  CHECK(cfg.seed == 99);
  CHECK(cfg.gan.seed == 99);
  CHECK(cfg.classifier.train.seed == 99);
  CHECK(cfg.gan.arch.base_channels == 8);
  CHECK(cfg.gan.iterations == 2000);
  CHECK(cfg.classifier.arch.channels == std::vector<int>{4, 8, 8, 16});
  CHECK(cfg.classifier.arch.image_size == 128);
  CHECK(cfg.dataset.toy.clip_samples == 33536);
}

TEST_CASE("config snapshots round-trip through yaml") {
  ExperimentConfig cfg = parse_config(
      "seed: 7\n"
      "output_dir: /tmp/somewhere\n"
      "gan: {base_channels: 4, iterations: 123, cond_jitter: 0.07}\n"
      "dataset: {toy: {counts: [11, 12, 13]}, imbalance: {drop_fraction: 0.75}}\n");
  ExperimentConfig back = parse_config(config_to_yaml(cfg));
  CHECK(back.seed == cfg.seed);
  CHECK(back.output_dir == cfg.output_dir);
  CHECK(back.gan.arch.base_channels == 4);
  CHECK(back.gan.iterations == 123);
  CHECK(back.gan.cond_jitter == 0.07);
  CHECK(back.dataset.toy.counts == std::vector<int>{11, 12, 13});
  CHECK(back.dataset.imbalance_drop_fraction == 0.75);
  CHECK(back.classifier.train.learning_rate == cfg.classifier.train.learning_rate);
}
