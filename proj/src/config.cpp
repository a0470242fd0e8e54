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
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "melaug/pipeline/config.hpp"

namespace melaug::pipeline {

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
  fail(ErrorCode::config, "config: " + msg);
}

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsDefined() || node.IsNull()) return;
  if (!node.IsMap()) config_fail(where + " must be a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) config_fail("unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node.IsDefined() || node.IsNull()) return;
  const YAML::Node v = node[key];
  if (!v.IsDefined() || v.IsNull()) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    config_fail(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    config_fail(std::string("yaml parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  check_keys(root, "", {"seed", "output_dir", "dataset", "dsp", "augment", "gan",
                        "classifier", "evaluation"});
  read(root, "seed", cfg.seed);
  read(root, "output_dir", cfg.output_dir);

  const YAML::Node ds = root["dataset"];
  check_keys(ds, "dataset",
             {"mode", "class_names", "toy", "sources", "split", "imbalance",
              "balance_target", "trim_threshold_db"});
  read(ds, "mode", cfg.dataset.mode);
  read(ds, "class_names", cfg.dataset.class_names);
  read(ds, "balance_target", cfg.dataset.balance_target);
  read(ds, "trim_threshold_db", cfg.dataset.trim_threshold_db);
  if (ds.IsDefined() && !ds.IsNull()) {
    const YAML::Node toy = ds["toy"];
    check_keys(toy, "dataset.toy",
               {"counts", "clip_samples", "noise_db", "noise_db_jitter"});
    read(toy, "counts", cfg.dataset.toy.counts);
    long long clip_samples = cfg.dataset.toy.clip_samples;
    read(toy, "clip_samples", clip_samples);
    cfg.dataset.toy.clip_samples = clip_samples;
    read(toy, "noise_db", cfg.dataset.toy.noise_db);
    read(toy, "noise_db_jitter", cfg.dataset.toy.noise_db_jitter);

    const YAML::Node split = ds["split"];
    check_keys(split, "dataset.split", {"train", "val", "test"});
    read(split, "train", cfg.dataset.split.train);
    read(split, "val", cfg.dataset.split.val);
    read(split, "test", cfg.dataset.split.test);

    const YAML::Node imb = ds["imbalance"];
    check_keys(imb, "dataset.imbalance", {"enabled", "class", "drop_fraction"});
    read(imb, "enabled", cfg.dataset.imbalance_enabled);
    read(imb, "class", cfg.dataset.imbalance_class);
    read(imb, "drop_fraction", cfg.dataset.imbalance_drop_fraction);

    const YAML::Node sources = ds["sources"];
    if (sources.IsDefined() && !sources.IsNull()) {
      if (!sources.IsSequence()) config_fail("dataset.sources must be a sequence");
      for (const auto& s : sources) {
        check_keys(s, "dataset.sources[]", {"path", "label", "segments"});
        CorpusSource src;
        read(s, "path", src.path);
        read(s, "label", src.label);
        read(s, "segments", src.segments);
        if (src.path.empty() || src.label.empty())
          config_fail("dataset.sources entries need path and label");
        cfg.dataset.sources.push_back(std::move(src));
      }
    }
  }

  const YAML::Node dsp = root["dsp"];
  check_keys(dsp, "dsp",
             {"sample_rate", "fft_size", "hop", "mel_bands", "frames", "fmin_hz",
              "fmax_hz", "db_floor", "db_range", "f0"});
  read(dsp, "sample_rate", cfg.dsp.sample_rate);
  read(dsp, "fft_size", cfg.dsp.fft_size);
  read(dsp, "hop", cfg.dsp.hop);
  read(dsp, "mel_bands", cfg.dsp.mel_bands);
  read(dsp, "frames", cfg.dsp.frames);
  read(dsp, "fmin_hz", cfg.dsp.fmin_hz);
  read(dsp, "fmax_hz", cfg.dsp.fmax_hz);
  read(dsp, "db_floor", cfg.dsp.db_floor);
  read(dsp, "db_range", cfg.dsp.db_range);
  if (dsp.IsDefined() && !dsp.IsNull()) {
    const YAML::Node f0 = dsp["f0"];
    check_keys(f0, "dsp.f0", {"fmin_hz", "fmax_hz", "voicing_threshold"});
    read(f0, "fmin_hz", cfg.f0.fmin_hz);
    read(f0, "fmax_hz", cfg.f0.fmax_hz);
    read(f0, "voicing_threshold", cfg.f0.voicing_threshold);
  }

  const YAML::Node aug = root["augment"];
  check_keys(aug, "augment", {"spec", "stretch", "pitch"});
  if (aug.IsDefined() && !aug.IsNull()) {
    const YAML::Node spec = aug["spec"];
    check_keys(spec, "augment.spec", {"F", "T", "n_freq_masks", "n_time_masks"});
    read(spec, "F", cfg.augment.spec.F);
    read(spec, "T", cfg.augment.spec.T);
    read(spec, "n_freq_masks", cfg.augment.spec.n_freq_masks);
    read(spec, "n_time_masks", cfg.augment.spec.n_time_masks);
    const YAML::Node st = aug["stretch"];
    check_keys(st, "augment.stretch", {"min", "max"});
    read(st, "min", cfg.augment.stretch_min);
    read(st, "max", cfg.augment.stretch_max);
    const YAML::Node pt = aug["pitch"];
    check_keys(pt, "augment.pitch", {"min", "max"});
    read(pt, "min", cfg.augment.pitch_min);
    read(pt, "max", cfg.augment.pitch_max);
  }

  const YAML::Node g = root["gan"];
  check_keys(g, "gan",
             {"image_size", "cond_dim", "base_channels", "stages", "kernel_size",
              "dropout", "leaky_relu_alpha", "lambda_gp", "lambda_recon",
              "learning_rate", "adam_beta1", "adam_beta2", "batch_size", "iterations",
              "critic_steps", "checkpoint_interval", "log_interval", "sample_dropout",
              "cond_jitter"});
  read(g, "image_size", cfg.gan.arch.image_size);
  read(g, "cond_dim", cfg.gan.arch.cond_dim);
  read(g, "base_channels", cfg.gan.arch.base_channels);
  read(g, "stages", cfg.gan.arch.stages);
  read(g, "kernel_size", cfg.gan.arch.kernel_size);
  read(g, "dropout", cfg.gan.arch.dropout_p);
  read(g, "leaky_relu_alpha", cfg.gan.arch.leaky_relu_alpha);
  read(g, "lambda_gp", cfg.gan.lambda_gp);
  read(g, "lambda_recon", cfg.gan.lambda_recon);
  read(g, "learning_rate", cfg.gan.learning_rate);
  read(g, "adam_beta1", cfg.gan.adam_beta1);
  read(g, "adam_beta2", cfg.gan.adam_beta2);
  read(g, "batch_size", cfg.gan.batch_size);
  read(g, "iterations", cfg.gan.iterations);
  read(g, "critic_steps", cfg.gan.critic_steps);
  read(g, "checkpoint_interval", cfg.gan.checkpoint_interval);
  read(g, "log_interval", cfg.gan.log_interval);
  read(g, "sample_dropout", cfg.gan.sample_dropout);
  read(g, "cond_jitter", cfg.gan.cond_jitter);

  const YAML::Node clf = root["classifier"];
  check_keys(clf, "classifier",
             {"channels", "kernel_size", "leaky_relu_alpha", "hidden_size",
              "learning_rate", "max_epochs", "patience", "batch_size"});
  read(clf, "channels", cfg.classifier.arch.channels);
  read(clf, "kernel_size", cfg.classifier.arch.kernel_size);
  read(clf, "leaky_relu_alpha", cfg.classifier.arch.leaky_relu_alpha);
  read(clf, "hidden_size", cfg.classifier.arch.hidden_size);
  read(clf, "learning_rate", cfg.classifier.train.learning_rate);
  read(clf, "max_epochs", cfg.classifier.train.max_epochs);
  read(clf, "patience", cfg.classifier.train.patience);
  read(clf, "batch_size", cfg.classifier.train.batch_size);

  const YAML::Node ev = root["evaluation"];
  check_keys(ev, "evaluation",
             {"fid_sample_sizes", "fid_trend_samples", "feature_mode"});
  read(ev, "fid_sample_sizes", cfg.evaluation.fid_sample_sizes);
  read(ev, "fid_trend_samples", cfg.evaluation.fid_trend_samples);
  read(ev, "feature_mode", cfg.evaluation.feature_mode);

  // cross-field checks
  if (cfg.dataset.mode != "toy" && cfg.dataset.mode != "corpus")
    config_fail("dataset.mode must be 'toy' or 'corpus'");
  if (cfg.dataset.class_names.size() != 3)
    config_fail("exactly three class names are required");
  if (cfg.gan.arch.image_size != cfg.dsp.mel_bands ||
      cfg.gan.arch.image_size != cfg.dsp.frames)
    config_fail("gan.image_size must match dsp.mel_bands and dsp.frames");
  if ((cfg.gan.arch.image_size >> cfg.gan.arch.stages) << cfg.gan.arch.stages !=
      cfg.gan.arch.image_size)
    config_fail("gan.stages must evenly halve gan.image_size");
  cfg.gan.arch.image_size = cfg.dsp.mel_bands;
  cfg.gan.seed = cfg.seed;
  cfg.classifier.train.seed = cfg.seed;
  cfg.classifier.arch.image_size = cfg.dsp.mel_bands;
  cfg.classifier.arch.num_classes = static_cast<int>(cfg.dataset.class_names.size());
  cfg.dataset.toy.sample_rate = cfg.dsp.sample_rate;
  cfg.dataset.toy.clip_samples = cfg.dsp.clip_samples();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "output_dir" << YAML::Value << cfg.output_dir;

  out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << cfg.dataset.mode;
  out << YAML::Key << "class_names" << YAML::Value << YAML::Flow
      << cfg.dataset.class_names;
  out << YAML::Key << "toy" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "counts" << YAML::Value << YAML::Flow << cfg.dataset.toy.counts;
  out << YAML::Key << "noise_db" << YAML::Value << cfg.dataset.toy.noise_db;
  out << YAML::Key << "noise_db_jitter" << YAML::Value
      << cfg.dataset.toy.noise_db_jitter;
  out << YAML::EndMap;
  if (!cfg.dataset.sources.empty()) {
    out << YAML::Key << "sources" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : cfg.dataset.sources) {
      out << YAML::BeginMap;
      out << YAML::Key << "path" << YAML::Value << s.path;
      out << YAML::Key << "label" << YAML::Value << s.label;
      if (!s.segments.empty())
        out << YAML::Key << "segments" << YAML::Value << s.segments;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "split" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "train" << YAML::Value << cfg.dataset.split.train;
  out << YAML::Key << "val" << YAML::Value << cfg.dataset.split.val;
  out << YAML::Key << "test" << YAML::Value << cfg.dataset.split.test;
  out << YAML::EndMap;
  out << YAML::Key << "imbalance" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << cfg.dataset.imbalance_enabled;
  out << YAML::Key << "class" << YAML::Value << cfg.dataset.imbalance_class;
  out << YAML::Key << "drop_fraction" << YAML::Value
      << cfg.dataset.imbalance_drop_fraction;
  out << YAML::EndMap;
  out << YAML::Key << "balance_target" << YAML::Value << cfg.dataset.balance_target;
  out << YAML::Key << "trim_threshold_db" << YAML::Value
      << cfg.dataset.trim_threshold_db;
  out << YAML::EndMap;

  out << YAML::Key << "dsp" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sample_rate" << YAML::Value << cfg.dsp.sample_rate;
  out << YAML::Key << "fft_size" << YAML::Value << cfg.dsp.fft_size;
  out << YAML::Key << "hop" << YAML::Value << cfg.dsp.hop;
  out << YAML::Key << "mel_bands" << YAML::Value << cfg.dsp.mel_bands;
  out << YAML::Key << "frames" << YAML::Value << cfg.dsp.frames;
  out << YAML::Key << "fmin_hz" << YAML::Value << cfg.dsp.fmin_hz;
  out << YAML::Key << "fmax_hz" << YAML::Value << cfg.dsp.fmax_hz;
  out << YAML::Key << "db_floor" << YAML::Value << cfg.dsp.db_floor;
  out << YAML::Key << "db_range" << YAML::Value << cfg.dsp.db_range;
  out << YAML::Key << "f0" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "fmin_hz" << YAML::Value << cfg.f0.fmin_hz;
  out << YAML::Key << "fmax_hz" << YAML::Value << cfg.f0.fmax_hz;
  out << YAML::Key << "voicing_threshold" << YAML::Value << cfg.f0.voicing_threshold;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "augment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "spec" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "F" << YAML::Value << cfg.augment.spec.F;
  out << YAML::Key << "T" << YAML::Value << cfg.augment.spec.T;
  out << YAML::Key << "n_freq_masks" << YAML::Value << cfg.augment.spec.n_freq_masks;
  out << YAML::Key << "n_time_masks" << YAML::Value << cfg.augment.spec.n_time_masks;
  out << YAML::EndMap;
  out << YAML::Key << "stretch" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "min" << YAML::Value << cfg.augment.stretch_min;
  out << YAML::Key << "max" << YAML::Value << cfg.augment.stretch_max;
  out << YAML::EndMap;
  out << YAML::Key << "pitch" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "min" << YAML::Value << cfg.augment.pitch_min;
  out << YAML::Key << "max" << YAML::Value << cfg.augment.pitch_max;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "gan" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "image_size" << YAML::Value << cfg.gan.arch.image_size;
  out << YAML::Key << "cond_dim" << YAML::Value << cfg.gan.arch.cond_dim;
  out << YAML::Key << "base_channels" << YAML::Value << cfg.gan.arch.base_channels;
  out << YAML::Key << "stages" << YAML::Value << cfg.gan.arch.stages;
  out << YAML::Key << "kernel_size" << YAML::Value << cfg.gan.arch.kernel_size;
  out << YAML::Key << "dropout" << YAML::Value << cfg.gan.arch.dropout_p;
  out << YAML::Key << "leaky_relu_alpha" << YAML::Value
      << cfg.gan.arch.leaky_relu_alpha;
  out << YAML::Key << "lambda_gp" << YAML::Value << cfg.gan.lambda_gp;
  out << YAML::Key << "lambda_recon" << YAML::Value << cfg.gan.lambda_recon;
  out << YAML::Key << "learning_rate" << YAML::Value << cfg.gan.learning_rate;
  out << YAML::Key << "adam_beta1" << YAML::Value << cfg.gan.adam_beta1;
  out << YAML::Key << "adam_beta2" << YAML::Value << cfg.gan.adam_beta2;
  out << YAML::Key << "batch_size" << YAML::Value << cfg.gan.batch_size;
  out << YAML::Key << "iterations" << YAML::Value << cfg.gan.iterations;
  out << YAML::Key << "critic_steps" << YAML::Value << cfg.gan.critic_steps;
  out << YAML::Key << "checkpoint_interval" << YAML::Value
      << cfg.gan.checkpoint_interval;
  out << YAML::Key << "log_interval" << YAML::Value << cfg.gan.log_interval;
  out << YAML::Key << "sample_dropout" << YAML::Value << cfg.gan.sample_dropout;
  out << YAML::Key << "cond_jitter" << YAML::Value << cfg.gan.cond_jitter;
  out << YAML::EndMap;

  out << YAML::Key << "classifier" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "channels" << YAML::Value << YAML::Flow
      << cfg.classifier.arch.channels;
  out << YAML::Key << "kernel_size" << YAML::Value << cfg.classifier.arch.kernel_size;
  out << YAML::Key << "leaky_relu_alpha" << YAML::Value
      << cfg.classifier.arch.leaky_relu_alpha;
  out << YAML::Key << "hidden_size" << YAML::Value << cfg.classifier.arch.hidden_size;
  out << YAML::Key << "learning_rate" << YAML::Value
      << cfg.classifier.train.learning_rate;
  out << YAML::Key << "max_epochs" << YAML::Value << cfg.classifier.train.max_epochs;
  out << YAML::Key << "patience" << YAML::Value << cfg.classifier.train.patience;
  out << YAML::Key << "batch_size" << YAML::Value << cfg.classifier.train.batch_size;
  out << YAML::EndMap;

  out << YAML::Key << "evaluation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "fid_sample_sizes" << YAML::Value << YAML::Flow
      << cfg.evaluation.fid_sample_sizes;
  out << YAML::Key << "fid_trend_samples" << YAML::Value
      << cfg.evaluation.fid_trend_samples;
  out << YAML::Key << "feature_mode" << YAML::Value << cfg.evaluation.feature_mode;
  out << YAML::EndMap << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace melaug::pipeline
