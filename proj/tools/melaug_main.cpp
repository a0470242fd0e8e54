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

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "melaug/pipeline/commands.hpp"

namespace {

// 0 success, 2 config error, 3 missing prerequisite, 4 numerical failure,
// 1 anything else.
int exit_code_for(melaug::ErrorCode code) {
  switch (code) {
    case melaug::ErrorCode::config: return 2;
    case melaug::ErrorCode::missing_prerequisite: return 3;
    case melaug::ErrorCode::numerical: return 4;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "melaug: F0-conditioned WGAN-GP mel-spectrogram augmentation for "
      "code-switched spoken language identification"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> output_override;
  bool force = false;
  app.add_option("--config", config_path, "experiment config (YAML)")
      ->required()
      ->group("global");
  app.add_option("--seed", seed_override, "override the config seed")->group("global");
  app.add_option("--output", output_override, "override the output directory")
      ->group("global");
  app.add_flag("--force", force, "overwrite existing artifacts")->group("global");

  auto* prepare = app.add_subcommand("prepare-data",
                                     "build the corpus, manifests, features and stats");

  auto* train_gan = app.add_subcommand("train-gan", "train the WGAN-GP on the minority class");
  bool resume = false;
  std::int64_t iterations_override = -1;
  train_gan->add_flag("--resume", resume, "continue from the latest checkpoint");
  train_gan->add_option("--iterations", iterations_override,
                        "override gan.iterations from the config");

  auto* sample_gan = app.add_subcommand("sample-gan", "sample spectrograms from a checkpoint");
  int sample_count = 64;
  std::string sample_ckpt;
  sample_gan->add_option("--count", sample_count, "number of samples");
  sample_gan->add_option("--checkpoint", sample_ckpt,
                         "checkpoint directory (default: latest)");

  auto* train_clf = app.add_subcommand("train-classifier", "train the CRNN classifier");
  std::string mode = "none";
  train_clf
      ->add_option("--augmentation", mode,
                   "augmentation mode: none|specaugment|stretch|pitch|gan")
      ->check(CLI::IsMember({"none", "specaugment", "stretch", "pitch", "gan"}));

  auto* evaluate = app.add_subcommand("evaluate", "compute test metrics for trained classifiers");
  std::string eval_mode = "all";
  evaluate->add_option("--mode", eval_mode, "augmentation mode or 'all'");

  auto* fid = app.add_subcommand("fid", "FID tables for the trained GAN");
  bool trend = false;
  fid->add_flag("--trend", trend, "FID per checkpoint instead of the sample-size table");

  auto* report = app.add_subcommand("report", "aggregate metrics into tables and charts");

  CLI11_PARSE(app, argc, argv);

  try {
    melaug::pipeline::ExperimentConfig cfg = melaug::pipeline::load_config(config_path);
    if (seed_override) {
      cfg.seed = *seed_override;
      cfg.gan.seed = *seed_override;
      cfg.classifier.train.seed = *seed_override;
    }
    if (output_override) cfg.output_dir = *output_override;

    if (prepare->parsed()) {
      melaug::pipeline::cmd_prepare_data(cfg, force);
    } else if (train_gan->parsed()) {
      melaug::pipeline::cmd_train_gan(
          cfg, force, resume,
          iterations_override >= 0 ? std::optional<std::int64_t>(iterations_override)
                                   : std::nullopt);
    } else if (sample_gan->parsed()) {
      melaug::pipeline::cmd_sample_gan(cfg, sample_count, sample_ckpt, force);
    } else if (train_clf->parsed()) {
      melaug::pipeline::cmd_train_classifier(
          cfg, melaug::pipeline::augmentation_mode_from_name(mode), force);
    } else if (evaluate->parsed()) {
      melaug::pipeline::cmd_evaluate(cfg, eval_mode);
    } else if (fid->parsed()) {
      melaug::pipeline::cmd_fid(cfg, trend, force);
    } else if (report->parsed()) {
      melaug::pipeline::cmd_report(cfg, force);
    }
  } catch (const melaug::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
