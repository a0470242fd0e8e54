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
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "melaug/augment/spec_augment.hpp"
#include "melaug/augment/time_stretch.hpp"
#include "melaug/crnn/train.hpp"
#include "melaug/dsp/mel.hpp"
#include "melaug/pipeline/checkpoint_io.hpp"
#include "melaug/pipeline/commands.hpp"
#include "pipeline_internal.hpp"

namespace melaug::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

const char* augmentation_mode_name(AugmentationMode mode) {
  switch (mode) {
    case AugmentationMode::none: return "none";
    case AugmentationMode::specaugment: return "specaugment";
    case AugmentationMode::stretch: return "stretch";
    case AugmentationMode::pitch: return "pitch";
    case AugmentationMode::gan: return "gan";
  }
  return "?";
}

AugmentationMode augmentation_mode_from_name(const std::string& name) {
  for (auto m : {AugmentationMode::none, AugmentationMode::specaugment,
                 AugmentationMode::stretch, AugmentationMode::pitch,
                 AugmentationMode::gan})
    if (name == augmentation_mode_name(m)) return m;
  fail(ErrorCode::invalid_argument, "unknown augmentation mode: " + name);
}

namespace {

struct TrainingData {
  Eigen::MatrixXf x;  // norm_01 columns
  std::vector<int> labels;
  std::vector<std::string> ids;
};

// dB-domain audio -> classifier column for on-the-fly raw-audio augmentation.
Eigen::VectorXf clip_to_column(const audio::AudioClip& clip, const ExperimentConfig& cfg,
                               const dsp::MatX<float>& filterbank,
                               const dsp::NormStats& clf_stats, std::uint64_t crop_seed) {
  audio::AudioClip fixed =
      audio::crop_or_pad(clip, cfg.dsp.clip_samples(), audio::CropMode::random, crop_seed);
  auto spec = dsp::mel_spectrogram<float>(fixed, cfg.dsp, &filterbank);
  auto db = dsp::to_db(spec, cfg.dsp);
  auto x01 = dsp::apply_minmax_values<float>(db.values, clf_stats, dsp::SpecDomain::norm_01);
  return Eigen::Map<const Eigen::VectorXf>(x01.data(), x01.size());
}

void write_history(const std::string& path, const crnn::TrainResult& result) {
  std::ofstream out(path);
  out << "epoch\ttrain_loss\tval_loss\tval_uar\n";
  for (const auto& row : result.history)
    out << row.epoch << "\t" << row.train_loss << "\t" << row.val_loss << "\t"
        << row.val_uar << "\n";
}

json metrics_to_json(const eval::MetricsReport& report) {
  json per_class = json::object();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const std::string name =
        c < report.class_names.size() ? report.class_names[c] : std::to_string(c);
    per_class[name] = {{"precision", report.per_class[c].precision},
                       {"recall", report.per_class[c].recall},
                       {"f1", report.per_class[c].f1}};
  }
  return json{{"accuracy", report.accuracy},
              {"uar", report.uar},
              {"macro_f1", report.macro_f1},
              {"per_class", per_class}};
}

}  // namespace

void cmd_train_classifier(const ExperimentConfig& cfg, AugmentationMode mode,
                          bool force) {
  Workspace ws{cfg.output_dir};
  const std::string mode_name = augmentation_mode_name(mode);
  const std::string out_dir = ws.clf_dir(mode_name);
  refuse_overwrite(out_dir, force);
  if (fs::exists(out_dir)) fs::remove_all(out_dir);

  require_exists(ws.features_path("train"), "training features");
  const data::FeatureSet train_fs = data::load_feature_set(ws.features_path("train"));
  const data::FeatureSet val_fs = data::load_feature_set(ws.features_path("val"));
  const dsp::NormStats clf_stats = data::load_norm_stats(ws.stats_path("clf_norm"));
  const data::DatasetManifest manifest = data::load_manifest(ws.manifest_path());
  const int minority = manifest.class_index(minority_class(cfg, manifest));

  TrainingData train{to_norm01(train_fs.spec_db, clf_stats), train_fs.labels,
                     train_fs.ids};
  const Eigen::MatrixXf val_x = to_norm01(val_fs.spec_db, clf_stats);

  const auto filterbank = dsp::mel_filterbank<float>(cfg.dsp);
  std::unordered_map<std::string, std::string> path_by_id;
  for (const auto& e : manifest.examples) path_by_id[e.id] = e.path;

  // Raw-audio modes keep the minority train clips in memory for per-epoch
  // recomputation.
  std::unordered_map<Eigen::Index, audio::AudioClip> minority_clips;
  if (mode == AugmentationMode::stretch || mode == AugmentationMode::pitch) {
    for (Eigen::Index i = 0; i < train.x.cols(); ++i)
      if (train.labels[static_cast<std::size_t>(i)] == minority)
        minority_clips.emplace(i, audio::read_wav(path_by_id.at(train.ids[i])));
  }

  if (mode == AugmentationMode::gan) {
    const auto ckpts = list_gan_checkpoints(ws.gan_dir());
    require(!ckpts.empty(), ErrorCode::missing_prerequisite,
            "gan augmentation requires a trained gan checkpoint (run train-gan)");
    const std::string ckpt = ckpts.back().second;
    const GanCheckpointInfo info = read_gan_checkpoint_info(ckpt);
    gan::GeneratorNet<float> generator(info.config.arch, info.config.seed);
    load_generator(ckpt, generator);

    int majority = 0, current = 0;
    for (const auto& cls : manifest.class_names)
      majority = std::max(majority, manifest.count("train", cls));
    current = manifest.count("train", manifest.class_names[minority]);
    const int target =
        cfg.dataset.balance_target > 0 ? cfg.dataset.balance_target : majority;
    require(target >= current, ErrorCode::invalid_argument,
            "balance target below current minority count");
    const int needed = target - current;

    const auto cols = class_columns(train_fs, minority);
    const Eigen::MatrixXf pool =
        conditioning_vectors(train_fs.f0_hz, cols, info.f0_stats);

    Eigen::MatrixXf synth(train.x.rows(), needed);
    Rng pick_rng = Rng::stream(cfg.seed, "balance_cond");
    constexpr int kChunk = 32;
    for (int at = 0; at < needed; at += kChunk) {
      const int len = std::min(kChunk, needed - at);
      Eigen::MatrixXf conds(pool.rows(), len);
      for (int j = 0; j < len; ++j) {
        Eigen::VectorXf v = pool.col(pick_rng.uniform_int(0, pool.cols() - 1));
        for (Eigen::Index i = 0; i < v.size(); ++i)
          if (v[i] != 0.0f)
            v[i] = static_cast<float>(std::min(
                1.0, std::max(0.0, v[i] + pick_rng.uniform(-info.config.cond_jitter,
                                                           info.config.cond_jitter))));
        conds.col(j) = v;
      }
      const Eigen::MatrixXf pm1 = gan::sample_generator(
          generator, conds,
          Rng::stream(cfg.seed, "balance_sample", static_cast<std::uint64_t>(at)).next_u64(),
          info.config.sample_dropout);
      const Eigen::MatrixXf db = dsp::invert_minmax_values<float>(
          pm1, info.spec_stats, dsp::SpecDomain::norm_pm1);
      synth.middleCols(at, len) =
          dsp::apply_minmax_values<float>(db, clf_stats, dsp::SpecDomain::norm_01);
    }

    fs::create_directories(out_dir);
    std::ofstream synth_manifest(out_dir + "/synthetic.jsonl");
    const Eigen::Index base = train.x.cols();
    Eigen::MatrixXf combined(train.x.rows(), base + needed);
    combined.leftCols(base) = train.x;
    combined.rightCols(needed) = synth;
    train.x = std::move(combined);
    for (int i = 0; i < needed; ++i) {
      const std::string id = "synthetic_" + std::to_string(i);
      train.labels.push_back(minority);
      train.ids.push_back(id);
      synth_manifest << json{{"id", id},
                             {"path", ""},
                             {"label", manifest.class_names[minority]},
                             {"split", "train"},
                             {"duration", 0.0},
                             {"synthetic", true}}
                            .dump()
                     << "\n";
    }
    std::printf("gan mode: added %d synthetic minority examples (%d -> %d)\n", needed,
                current, target);
  }

  crnn::BatchAugmentHook<float> hook;
  if (mode == AugmentationMode::specaugment) {
    hook = [&, minority](int epoch, const std::vector<Eigen::Index>& ids,
                         Eigen::MatrixXf& batch) {
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (train.labels[static_cast<std::size_t>(ids[j])] != minority) continue;
        dsp::MelSpectrogram<float> spec;
        spec.domain = dsp::SpecDomain::norm_01;
        spec.values = Eigen::Map<const Eigen::MatrixXf>(batch.col(j).data(),
                                                        cfg.dsp.mel_bands, cfg.dsp.frames);
        auto masked = augment::spec_augment<float>(
            spec, cfg.augment.spec,
            cfg.seed ^ Rng::hash_tag("specaug") ^
                (static_cast<std::uint64_t>(epoch) << 32 | static_cast<std::uint64_t>(ids[j])));
        batch.col(j) = Eigen::Map<const Eigen::VectorXf>(masked.values.data(),
                                                         masked.values.size());
      }
    };
  } else if (mode == AugmentationMode::stretch || mode == AugmentationMode::pitch) {
    hook = [&, minority, mode](int epoch, const std::vector<Eigen::Index>& ids,
                               Eigen::MatrixXf& batch) {
      for (std::size_t j = 0; j < ids.size(); ++j) {
        auto it = minority_clips.find(ids[j]);
        if (it == minority_clips.end()) continue;
        Rng rng = Rng::stream(cfg.seed, mode == AugmentationMode::stretch
                                            ? "stretch_draw"
                                            : "pitch_draw",
                              static_cast<std::uint64_t>(epoch),
                              static_cast<std::uint64_t>(ids[j]));
        audio::AudioClip augmented;
        if (mode == AugmentationMode::stretch) {
          const double rate = rng.uniform(cfg.augment.stretch_min, cfg.augment.stretch_max);
          augmented = augment::time_stretch(it->second, rate);
        } else {
          const int steps =
              static_cast<int>(rng.uniform_int(cfg.augment.pitch_min, cfg.augment.pitch_max));
          augmented = augment::pitch_shift(it->second, steps);
        }
        batch.col(j) = clip_to_column(augmented, cfg, filterbank, clf_stats,
                                      rng.next_u64());
      }
    };
  }

  crnn::CrnnNet<float> net(cfg.classifier.arch, cfg.seed);
  crnn::ClassifierTrainConfig train_cfg = cfg.classifier.train;
  train_cfg.seed = cfg.seed;
  const crnn::TrainResult result =
      crnn::train_classifier<float>(net, train.x, train.labels, val_x, val_fs.labels,
                                    train_cfg, hook);

  fs::create_directories(out_dir);
  CrnnCheckpointInfo info{cfg.classifier.arch, manifest.class_names, result.best_epoch,
                          result.best_val_uar};
  save_crnn_checkpoint(out_dir + "/ckpt", net, info);
  write_history(out_dir + "/history.tsv", result);
  std::printf("classifier[%s]: best val UAR %.4f at epoch %d (%zu epochs run)\n",
              mode_name.c_str(), result.best_val_uar, result.best_epoch,
              result.history.size());
}

void cmd_evaluate(const ExperimentConfig& cfg, const std::string& mode_or_all) {
  Workspace ws{cfg.output_dir};
  require_exists(ws.features_path("test"), "test features");
  const data::FeatureSet test_fs = data::load_feature_set(ws.features_path("test"));
  const dsp::NormStats clf_stats = data::load_norm_stats(ws.stats_path("clf_norm"));
  const data::DatasetManifest manifest = data::load_manifest(ws.manifest_path());
  const Eigen::MatrixXf test_x = to_norm01(test_fs.spec_db, clf_stats);

  std::vector<std::string> modes;
  if (mode_or_all == "all") {
    for (const char* m : {"none", "specaugment", "stretch", "pitch", "gan"})
      if (fs::exists(ws.clf_dir(m) + "/ckpt/meta.json")) modes.push_back(m);
    require(!modes.empty(), ErrorCode::missing_prerequisite,
            "no trained classifiers under " + ws.root);
  } else {
    augmentation_mode_from_name(mode_or_all);  // validates
    modes.push_back(mode_or_all);
  }

  for (const auto& mode : modes) {
    const std::string ckpt = ws.clf_dir(mode) + "/ckpt";
    require_exists(ckpt + "/meta.json", "classifier checkpoint for mode " + mode);
    const CrnnCheckpointInfo info = read_crnn_checkpoint_info(ckpt);
    crnn::CrnnNet<float> net(info.arch, 0);
    load_crnn_checkpoint(ckpt, net);

    std::vector<int> preds;
    preds.reserve(test_fs.labels.size());
    constexpr Eigen::Index kChunk = 64;
    for (Eigen::Index at = 0; at < test_x.cols(); at += kChunk) {
      const Eigen::Index len = std::min(kChunk, test_x.cols() - at);
      for (int p : net.predict(Eigen::MatrixXf(test_x.middleCols(at, len))))
        preds.push_back(p);
    }
    auto cm = eval::confusion_matrix(test_fs.labels, preds,
                                     static_cast<int>(manifest.class_names.size()));
    cm.class_names = manifest.class_names;
    const eval::MetricsReport report = eval::metrics_from_confusion(cm);

    json j = metrics_to_json(report);
    j["mode"] = mode;
    j["test_examples"] = static_cast<int>(test_fs.labels.size());
    json cm_json = json::array();
    for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) row.push_back(cm.counts(r, c));
      cm_json.push_back(row);
    }
    j["confusion"] = cm_json;
    std::ofstream out(ws.clf_dir(mode) + "/test_metrics.json");
    out << j.dump(2) << "\n";
    std::printf("evaluate[%s]: accuracy %.4f uar %.4f macro_f1 %.4f\n", mode.c_str(),
                report.accuracy, report.uar, report.macro_f1);
  }
}

}  // namespace melaug::pipeline
