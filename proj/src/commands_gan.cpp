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

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "melaug/eval/fid_trend.hpp"
#include "melaug/nn/serialize.hpp"
#include "melaug/pipeline/checkpoint_io.hpp"
#include "melaug/pipeline/commands.hpp"
#include "pipeline_internal.hpp"

namespace melaug::pipeline {

namespace fs = std::filesystem;

namespace {

gan::GanDataset<float> load_gan_dataset(const ExperimentConfig& cfg, const Workspace& ws,
                                        dsp::NormStats* spec_stats_out = nullptr,
                                        dsp::NormStats* f0_stats_out = nullptr) {
  require_exists(ws.features_path("train"), "training features");
  require_exists(ws.stats_path("gan_norm"), "gan normalization stats");
  const data::FeatureSet train_fs = data::load_feature_set(ws.features_path("train"));
  const dsp::NormStats gan_stats = data::load_norm_stats(ws.stats_path("gan_norm"));
  const dsp::NormStats f0_stats = data::load_norm_stats(ws.stats_path("f0_norm"));
  const data::DatasetManifest manifest = data::load_manifest(ws.manifest_path());
  const int minority = manifest.class_index(minority_class(cfg, manifest));
  const auto cols = class_columns(train_fs, minority);
  require(!cols.empty(), ErrorCode::missing_prerequisite,
          "no minority-class training features");

  gan::GanDataset<float> ds;
  ds.specs.resize(train_fs.spec_db.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    ds.specs.col(static_cast<Eigen::Index>(j)) = train_fs.spec_db.col(cols[j]);
  ds.specs =
      dsp::apply_minmax_values<float>(ds.specs, gan_stats, dsp::SpecDomain::norm_pm1);
  ds.conds = conditioning_vectors(train_fs.f0_hz, cols, f0_stats);
  if (spec_stats_out) *spec_stats_out = gan_stats;
  if (f0_stats_out) *f0_stats_out = f0_stats;
  return ds;
}

void append_log_rows(const std::string& path, const std::vector<gan::TrainLogRow>& rows,
                     bool truncate) {
  std::ofstream out(path, truncate ? std::ios::trunc : std::ios::app);
  if (!out) fail(ErrorCode::io, "cannot write training log: " + path);
  if (truncate) out << "iteration\tcritic_total\tgenerator_total\tgp\trecon\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld\t%.17g\t%.17g\t%.17g\t%.17g\n",
                  static_cast<long long>(r.iteration), r.critic_total,
                  r.generator_total, r.gp, r.recon);
    out << buf;
  }
}

// Conditioning vectors for sampling new data: real minority contours with
// small uniform jitter on the voiced entries, clamped to [0,1].
Eigen::MatrixXf jittered_conditions(const Eigen::MatrixXf& pool, int count,
                                    double jitter, std::uint64_t seed) {
  Eigen::MatrixXf out(pool.rows(), count);
  Rng rng = Rng::stream(seed, "cond_jitter");
  for (int j = 0; j < count; ++j) {
    const Eigen::Index src = rng.uniform_int(0, pool.cols() - 1);
    Eigen::VectorXf v = pool.col(src);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v[i] != 0.0f)
        v[i] = static_cast<float>(
            std::min(1.0, std::max(0.0, v[i] + rng.uniform(-jitter, jitter))));
    out.col(j) = v;
  }
  return out;
}

void write_pgm_preview(const std::string& path, const Eigen::VectorXf& pm1_column,
                       int bands, int frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write preview: " + path);
  out << "P5\n" << frames << " " << bands << "\n255\n";
  // row 0 at the top = highest mel band
  for (int h = bands - 1; h >= 0; --h)
    for (int w = 0; w < frames; ++w) {
      const float v = pm1_column[static_cast<Eigen::Index>(w) * bands + h];
      const int byte = std::min(255, std::max(0, static_cast<int>((v + 1.0f) * 127.5f)));
      out.put(static_cast<char>(byte));
    }
}

}  // namespace

void cmd_train_gan(const ExperimentConfig& cfg, bool force, bool resume,
                   std::optional<std::int64_t> iterations_override) {
  Workspace ws{cfg.output_dir};
  gan::GanTrainConfig train_cfg = cfg.gan;
  if (iterations_override) train_cfg.iterations = *iterations_override;

  dsp::NormStats spec_stats, f0_stats;
  gan::GanDataset<float> dataset = load_gan_dataset(cfg, ws, &spec_stats, &f0_stats);

  auto existing = list_gan_checkpoints(ws.gan_dir());
  std::int64_t start_iteration = 0;
  if (!existing.empty() && !resume) {
    refuse_overwrite(ws.gan_dir(), force);
    fs::remove_all(ws.gan_dir());
    existing.clear();
  }

  gan::GanTrainer<float> trainer(std::move(dataset), train_cfg);
  GanCheckpointInfo info{0, train_cfg, spec_stats, f0_stats};
  fs::create_directories(ws.gan_dir());

  if (!existing.empty()) {
    const auto& [iter, dir] = existing.back();
    const GanCheckpointInfo stored = read_gan_checkpoint_info(dir);
    require(stored.config.arch.image_size == train_cfg.arch.image_size &&
                stored.config.arch.base_channels == train_cfg.arch.base_channels &&
                stored.config.arch.stages == train_cfg.arch.stages &&
                stored.config.seed == train_cfg.seed,
            ErrorCode::bad_checkpoint,
            "resume: checkpoint architecture/seed does not match the config");
    load_gan_checkpoint(dir, trainer);
    start_iteration = trainer.iteration();
    std::printf("resuming gan training from iteration %lld\n",
                static_cast<long long>(start_iteration));
  } else {
    // iteration-0 snapshot: the random-init baseline for FID trends
    info.iteration = 0;
    save_gan_checkpoint(ws.gan_ckpt_dir(0), trainer, info);
    append_log_rows(ws.gan_log_path(), {}, /*truncate=*/true);
  }

  std::vector<gan::TrainLogRow> pending;
  for (std::int64_t it = start_iteration + 1; it <= train_cfg.iterations; ++it) {
    gan::TrainLogRow row = trainer.step();
    if (row.iteration % train_cfg.log_interval == 0) pending.push_back(row);
    if (pending.size() >= 64) {
      append_log_rows(ws.gan_log_path(), pending, false);
      pending.clear();
    }
    if (row.iteration % train_cfg.checkpoint_interval == 0 ||
        row.iteration == train_cfg.iterations) {
      info.iteration = row.iteration;
      save_gan_checkpoint(ws.gan_ckpt_dir(row.iteration), trainer, info);
    }
  }
  append_log_rows(ws.gan_log_path(), pending, false);
  std::printf("gan training complete at iteration %lld\n",
              static_cast<long long>(trainer.iteration()));
}

void cmd_sample_gan(const ExperimentConfig& cfg, int count,
                    const std::string& checkpoint_dir, bool force) {
  Workspace ws{cfg.output_dir};
  std::string dir = checkpoint_dir;
  if (dir.empty()) {
    const auto ckpts = list_gan_checkpoints(ws.gan_dir());
    require(!ckpts.empty(), ErrorCode::missing_prerequisite,
            "no gan checkpoints under " + ws.gan_dir());
    dir = ckpts.back().second;
  }
  const GanCheckpointInfo info = read_gan_checkpoint_info(dir);
  gan::GeneratorNet<float> generator(info.config.arch, info.config.seed);
  load_generator(dir, generator);

  require_exists(ws.features_path("train"), "training features");
  const data::FeatureSet train_fs = data::load_feature_set(ws.features_path("train"));
  const data::DatasetManifest manifest = data::load_manifest(ws.manifest_path());
  const int minority = manifest.class_index(minority_class(cfg, manifest));
  const auto cols = class_columns(train_fs, minority);
  const Eigen::MatrixXf pool = conditioning_vectors(train_fs.f0_hz, cols, info.f0_stats);

  refuse_overwrite(ws.gan_samples_dir(), force);
  fs::create_directories(ws.gan_samples_dir());

  const Eigen::MatrixXf conds =
      jittered_conditions(pool, count, info.config.cond_jitter, cfg.seed);
  Eigen::MatrixXf samples(static_cast<Eigen::Index>(info.config.arch.image_size) *
                              info.config.arch.image_size,
                          count);
  constexpr int kChunk = 32;
  for (int at = 0; at < count; at += kChunk) {
    const int len = std::min(kChunk, count - at);
    samples.middleCols(at, len) = gan::sample_generator(
        generator, Eigen::MatrixXf(conds.middleCols(at, len)),
        Rng::stream(cfg.seed, "sample_cmd", static_cast<std::uint64_t>(at)).next_u64(),
        info.config.sample_dropout);
  }

  nn::BlobWriter blob(ws.gan_samples_dir() + "/samples.bin");
  blob.add<float>("spec_pm1", samples);
  blob.add<float>("cond", conds);
  blob.finish();
  for (int i = 0; i < std::min(count, 8); ++i)
    write_pgm_preview(ws.gan_samples_dir() + "/sample_" + std::to_string(i) + ".pgm",
                      samples.col(i), cfg.dsp.mel_bands, cfg.dsp.frames);
  std::printf("wrote %d samples from %s\n", count, dir.c_str());
}

void cmd_fid(const ExperimentConfig& cfg, bool trend, bool force) {
  Workspace ws{cfg.output_dir};
  const std::string clf_ckpt = ws.clf_dir(cfg.evaluation.feature_mode) + "/ckpt";
  require_exists(clf_ckpt + "/meta.json", "feature-extractor classifier checkpoint");
  const CrnnCheckpointInfo clf_info = read_crnn_checkpoint_info(clf_ckpt);
  crnn::CrnnNet<float> feature_net(clf_info.arch, 0);
  load_crnn_checkpoint(clf_ckpt, feature_net);

  require_exists(ws.features_path("test"), "test features");
  const data::FeatureSet test_fs = data::load_feature_set(ws.features_path("test"));
  const data::FeatureSet train_fs = data::load_feature_set(ws.features_path("train"));
  const dsp::NormStats clf_stats = data::load_norm_stats(ws.stats_path("clf_norm"));
  const data::DatasetManifest manifest = data::load_manifest(ws.manifest_path());
  const int minority = manifest.class_index(minority_class(cfg, manifest));

  const auto test_cols = class_columns(test_fs, minority);
  require(test_cols.size() >= 4, ErrorCode::missing_prerequisite,
          "too few minority test examples for FID");
  Eigen::MatrixXf real_specs(test_fs.spec_db.rows(),
                             static_cast<Eigen::Index>(test_cols.size()));
  for (std::size_t j = 0; j < test_cols.size(); ++j)
    real_specs.col(static_cast<Eigen::Index>(j)) = test_fs.spec_db.col(test_cols[j]);
  const Eigen::MatrixXd real_features =
      feature_net.extract_features(to_norm01(real_specs, clf_stats)).cast<double>();

  const auto ckpts = list_gan_checkpoints(ws.gan_dir());
  require(!ckpts.empty(), ErrorCode::missing_prerequisite,
          "no gan checkpoints under " + ws.gan_dir());
  const GanCheckpointInfo info = read_gan_checkpoint_info(ckpts.back().second);
  const auto train_cols = class_columns(train_fs, minority);
  const Eigen::MatrixXf cond_pool =
      conditioning_vectors(train_fs.f0_hz, train_cols, info.f0_stats);

  fs::create_directories(ws.fid_dir());

  if (trend) {
    const std::string path = ws.fid_dir() + "/fid_trend.tsv";
    refuse_overwrite(path, force);
    const int n_samples =
        std::min<int>(cfg.evaluation.fid_trend_samples,
                      std::max<int>(64, 4 * static_cast<int>(real_features.cols())));
    gan::GeneratorNet<float> generator(info.config.arch, info.config.seed);
    auto loader = [&](std::size_t k) {
      load_generator(ckpts[k].second, generator);
      return std::make_pair(ckpts[k].first, &generator);
    };
    const auto points = eval::fid_trend<float>(
        ckpts.size(), loader, real_features, cond_pool, n_samples, feature_net,
        info.spec_stats, clf_stats, cfg.seed, info.config.sample_dropout);
    std::ofstream out(path);
    out << "iteration\tfid\n";
    for (const auto& p : points)
      out << p.iteration << "\t" << p.fid << "\n";
    std::printf("wrote %zu-point FID trend (n=%d) to %s\n", points.size(), n_samples,
                path.c_str());
    return;
  }

  const std::string path = ws.fid_dir() + "/fid_table.tsv";
  refuse_overwrite(path, force);
  gan::GeneratorNet<float> generator(info.config.arch, info.config.seed);
  load_generator(ckpts.back().second, generator);

  int max_n = 0;
  for (int n : cfg.evaluation.fid_sample_sizes) max_n = std::max(max_n, n);
  Eigen::MatrixXd gen_features(real_features.rows(), max_n);
  constexpr int kChunk = 32;
  for (int at = 0; at < max_n; at += kChunk) {
    const int len = std::min(kChunk, max_n - at);
    const Eigen::MatrixXf conds = jittered_conditions(
        cond_pool, len, info.config.cond_jitter,
        cfg.seed ^ Rng::hash_tag("fid_table_" + std::to_string(at)));
    const Eigen::MatrixXf pm1 = gan::sample_generator(
        generator, conds,
        Rng::stream(cfg.seed, "fid_table_sample", static_cast<std::uint64_t>(at)).next_u64(),
        info.config.sample_dropout);
    const Eigen::MatrixXf db =
        dsp::invert_minmax_values<float>(pm1, info.spec_stats, dsp::SpecDomain::norm_pm1);
    gen_features.middleCols(at, len) =
        feature_net.extract_features(to_norm01(db, clf_stats)).cast<double>();
  }

  std::ofstream out(path);
  out << "row\trequested_n\tgen_n\treal_n\tfid\n";
  // real-vs-real reference: FID between the two halves of the real set
  {
    const Eigen::Index half = real_features.cols() / 2;
    const double v = eval::fid(real_features.leftCols(half),
                               real_features.rightCols(real_features.cols() - half));
    out << "real-split\t-\t" << half << "\t" << real_features.cols() - half << "\t" << v
        << "\n";
  }
  double sum = 0.0;
  int rows = 0;
  for (int n : cfg.evaluation.fid_sample_sizes) {
    const int gen_n = std::min<int>(n, max_n);
    const double v = eval::fid(real_features, gen_features.leftCols(gen_n));
    out << "gan\t" << n << "\t" << gen_n << "\t" << real_features.cols() << "\t" << v
        << "\n";
    sum += v;
    ++rows;
  }
  out << "avg\t-\t-\t-\t" << sum / rows << "\n";
  std::printf("wrote FID table to %s\n", path.c_str());
}

}  // namespace melaug::pipeline
