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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "melaug/audio/audio.hpp"
#include "melaug/data/toy.hpp"
#include "melaug/dsp/mel.hpp"
#include "melaug/pipeline/commands.hpp"
#include "pipeline_internal.hpp"

namespace melaug::pipeline {

namespace fs = std::filesystem;

std::string minority_class(const ExperimentConfig& cfg,
                           const data::DatasetManifest& manifest) {
  if (cfg.dataset.imbalance_enabled) return cfg.dataset.imbalance_class;
  std::string best;
  int best_count = -1;
  for (const auto& cls : manifest.class_names) {
    const int n = manifest.count("train", cls);
    if (best_count < 0 || n < best_count) {
      best_count = n;
      best = cls;
    }
  }
  return best;
}

Eigen::MatrixXf to_norm01(const Eigen::MatrixXf& spec_db, const dsp::NormStats& stats) {
  return dsp::apply_minmax_values<float>(spec_db, stats, dsp::SpecDomain::norm_01);
}

Eigen::MatrixXf conditioning_vectors(const Eigen::MatrixXf& f0_hz,
                                     const std::vector<Eigen::Index>& cols,
                                     const dsp::NormStats& f0_stats) {
  Eigen::MatrixXf out(f0_hz.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Eigen::VectorXf st = dsp::semitone<float>(Eigen::VectorXf(f0_hz.col(cols[j])));
    out.col(static_cast<Eigen::Index>(j)) = dsp::normalize_f0<float>(st, f0_stats).values;
  }
  return out;
}

std::vector<Eigen::Index> class_columns(const data::FeatureSet& fs, int class_idx) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < fs.size(); ++i)
    if (fs.labels[static_cast<std::size_t>(i)] == class_idx) cols.push_back(i);
  return cols;
}

namespace {

data::DatasetManifest assemble_from_sources(const ExperimentConfig& cfg,
                                            const Workspace& ws) {
  data::DatasetManifest manifest;
  manifest.class_names = cfg.dataset.class_names;
  manifest.seed = cfg.seed;
  fs::create_directories(ws.audio_dir());

  for (const auto& source : cfg.dataset.sources) {
    manifest.class_index(source.label);  // validates the mapping
    require_exists(source.path, "source directory");

    std::map<std::string, std::vector<audio::Segment>> segments_by_rec;
    if (!source.segments.empty())
      for (auto& seg : audio::parse_segments(source.segments))
        segments_by_rec[seg.recording_id].push_back(seg);

    std::vector<std::string> wavs;
    for (const auto& entry : fs::directory_iterator(source.path))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        wavs.push_back(entry.path().string());
    std::sort(wavs.begin(), wavs.end());
    require(!wavs.empty(), ErrorCode::invalid_argument,
            "no wav files under " + source.path);

    for (const auto& wav_path : wavs) {
      const std::string stem = fs::path(wav_path).stem().string();
      audio::AudioClip recording = audio::read_wav(wav_path);
      recording = audio::resample(recording, cfg.dsp.sample_rate);

      auto add_utterance = [&](const std::string& utt_id, const audio::AudioClip& raw) {
        audio::AudioClip clip =
            audio::trim_silence(raw, cfg.dataset.trim_threshold_db);
        if (clip.samples.size() == 0) return;  // all-silent utterance: skip
        data::LabeledExample e;
        e.id = source.label + "_" + utt_id;
        e.path = ws.audio_dir() + "/" + e.id + ".wav";
        e.label = source.label;
        e.duration = clip.duration_seconds();
        audio::write_wav(e.path, clip);
        manifest.examples.push_back(std::move(e));
      };

      auto it = segments_by_rec.find(stem);
      if (it != segments_by_rec.end())
        for (const auto& seg : it->second)
          add_utterance(seg.utterance_id, audio::cut_segment(recording, seg));
      else
        add_utterance(stem, recording);
    }
  }
  require(!manifest.examples.empty(), ErrorCode::invalid_argument,
          "assembled dataset is empty");
  return manifest;
}

data::FeatureSet build_features(const ExperimentConfig& cfg,
                                const data::DatasetManifest& manifest,
                                const std::string& split,
                                const dsp::MatX<float>& filterbank) {
  std::vector<const data::LabeledExample*> rows;
  for (const auto& e : manifest.examples)
    if (e.split == split) rows.push_back(&e);

  data::FeatureSet fsout;
  fsout.spec_db.resize(static_cast<Eigen::Index>(cfg.dsp.mel_bands) * cfg.dsp.frames,
                       static_cast<Eigen::Index>(rows.size()));
  fsout.f0_hz.resize(cfg.dsp.frames, static_cast<Eigen::Index>(rows.size()));

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = *rows[i];
    audio::AudioClip clip = audio::read_wav(e.path);
    const auto mode = split == "train" ? audio::CropMode::random : audio::CropMode::center;
    clip = audio::crop_or_pad(clip, cfg.dsp.clip_samples(), mode,
                              cfg.seed ^ Rng::hash_tag(e.id));
    auto spec = dsp::mel_spectrogram<float>(clip, cfg.dsp, &filterbank);
    auto db = dsp::to_db(spec, cfg.dsp);
    fsout.spec_db.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXf>(db.values.data(), db.values.size());
    fsout.f0_hz.col(static_cast<Eigen::Index>(i)) =
        dsp::extract_f0<float>(clip, cfg.dsp, cfg.f0).hz;
    fsout.ids.push_back(e.id);
    fsout.labels.push_back(manifest.class_index(e.label));
  }
  return fsout;
}

}  // namespace

void cmd_prepare_data(const ExperimentConfig& cfg, bool force) {
  Workspace ws{cfg.output_dir};
  refuse_overwrite(ws.manifest_path(), force);
  fs::create_directories(ws.root);
  fs::create_directories(ws.root + "/features");
  fs::create_directories(ws.root + "/stats");

  data::DatasetManifest manifest =
      cfg.dataset.mode == "toy"
          ? data::synth_toy_corpus(cfg.dataset.toy, cfg.dataset.class_names, cfg.seed,
                                   ws.audio_dir())
          : assemble_from_sources(cfg, ws);

  data::split_examples(manifest, cfg.dataset.split, cfg.seed);
  if (cfg.dataset.imbalance_enabled)
    data::simulate_imbalance(manifest, cfg.dataset.imbalance_class,
                             cfg.dataset.imbalance_drop_fraction, cfg.seed);
  data::save_manifest(ws.manifest_path(), manifest);

  const auto filterbank = dsp::mel_filterbank<float>(cfg.dsp);
  data::FeatureSet train_fs = build_features(cfg, manifest, "train", filterbank);
  data::FeatureSet val_fs = build_features(cfg, manifest, "val", filterbank);
  data::FeatureSet test_fs = build_features(cfg, manifest, "test", filterbank);

  // Classifier [0,1] stats over the full train split; GAN [-1,1] stats and
  // conditioning-semitone stats over the minority train subset only.
  const dsp::NormStats clf_stats = dsp::fit_minmax<float>(train_fs.spec_db, "db");
  const int minority = manifest.class_index(minority_class(cfg, manifest));
  const auto minority_cols = class_columns(train_fs, minority);
  require(!minority_cols.empty(), ErrorCode::invalid_argument,
          "no minority-class training examples");
  Eigen::MatrixXf minority_specs(train_fs.spec_db.rows(),
                                 static_cast<Eigen::Index>(minority_cols.size()));
  std::vector<Eigen::VectorXf> minority_semitones;
  for (std::size_t j = 0; j < minority_cols.size(); ++j) {
    minority_specs.col(static_cast<Eigen::Index>(j)) = train_fs.spec_db.col(minority_cols[j]);
    minority_semitones.push_back(
        dsp::semitone<float>(Eigen::VectorXf(train_fs.f0_hz.col(minority_cols[j]))));
  }
  const dsp::NormStats gan_stats = dsp::fit_minmax<float>(minority_specs, "db");
  const dsp::NormStats f0_stats = dsp::fit_semitone_stats<float>(minority_semitones);

  data::save_feature_set(ws.features_path("train"), train_fs);
  data::save_feature_set(ws.features_path("val"), val_fs);
  data::save_feature_set(ws.features_path("test"), test_fs);
  data::save_norm_stats(ws.stats_path("clf_norm"), clf_stats);
  data::save_norm_stats(ws.stats_path("gan_norm"), gan_stats);
  data::save_norm_stats(ws.stats_path("f0_norm"), f0_stats);

  std::ofstream snap(ws.snapshot_path());
  snap << config_to_yaml(cfg);

  std::printf("prepared %zu examples (train %lld / val %lld / test %lld) under %s\n",
              manifest.examples.size(), static_cast<long long>(train_fs.size()),
              static_cast<long long>(val_fs.size()),
              static_cast<long long>(test_fs.size()), ws.root.c_str());
}

}  // namespace melaug::pipeline
