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

#include <filesystem>

#include "melaug/gan/losses.hpp"
#include "melaug/gan/train.hpp"
#include "melaug/pipeline/checkpoint_io.hpp"

using namespace melaug;
using namespace melaug::gan;
using nn::constant;
using nn::Var;
using Md = nn::MatX<double>;
using Mf = nn::MatX<float>;

namespace {

// Small-but-real toy setup: 16x16 images, two stages.
GanTrainConfig tiny_config(std::uint64_t seed) {
  GanTrainConfig cfg;
  cfg.arch.image_size = 16;
  cfg.arch.cond_dim = 8;
  cfg.arch.base_channels = 4;
  cfg.arch.stages = 2;
  cfg.arch.kernel_size = 3;
  cfg.batch_size = 4;
  cfg.critic_steps = 2;
  cfg.seed = seed;
  cfg.log_interval = 1;
  return cfg;
}

GanDataset<float> tiny_dataset(int n, std::uint64_t seed) {
  Rng rng(seed);
  GanDataset<float> ds;
  ds.specs.resize(16 * 16, n);
  ds.conds.resize(8, n);
  for (Eigen::Index i = 0; i < ds.specs.size(); ++i)
    ds.specs.data()[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (Eigen::Index i = 0; i < ds.conds.size(); ++i)
    ds.conds.data()[i] = static_cast<float>(rng.uniform(0.0, 1.0));
  return ds;
}

std::vector<Mf> snapshot_params(const nn::ParamStore<float>& store) {
  std::vector<Mf> out;
  for (const auto& [name, v] : store.entries()) out.push_back(v.value());
  return out;
}

}  // namespace

TEST_CASE("wgan_losses evaluates the score means") {
  Md real(1, 2), fake(1, 2);
  real << 1.0, 1.0;
  fake << 0.0, 0.0;
  auto l = wgan_losses(constant<double>(real), constant<double>(fake));
  CHECK(l.critic_loss.scalar() == doctest::Approx(-1.0));
  CHECK(l.generator_loss.scalar() == doctest::Approx(0.0));

  auto sym = wgan_losses(constant<double>(real), constant<double>(real));
  CHECK(sym.critic_loss.scalar() == doctest::Approx(0.0));

  Md r2(1, 2), f2(1, 2);
  r2 << 2.0, 4.0;
  f2 << 1.0, 1.0;
  auto hand = wgan_losses(constant<double>(r2), constant<double>(f2));
  CHECK(hand.critic_loss.scalar() == doctest::Approx(1.0 - 3.0));
  CHECK(hand.generator_loss.scalar() == doctest::Approx(-1.0));

  CHECK_THROWS_AS(wgan_losses(constant<double>(Md(1, 0)), constant<double>(Md(1, 0))),
                  Error);
}

TEST_CASE("gradient penalty identities for linear and constant critics") {
  Rng rng(4);
  Md real(6, 5), fake(6, 5);
  for (Eigen::Index i = 0; i < real.size(); ++i) {
    real.data()[i] = rng.uniform(-1.0, 1.0);
    fake.data()[i] = rng.uniform(-1.0, 1.0);
  }
  Eigen::Matrix<double, 1, Eigen::Dynamic> alphas(1, 5);
  alphas << 0.1, 0.3, 0.5, 0.7, 0.9;

  Md w(1, 6);
  for (int i = 0; i < 6; ++i) w(0, i) = rng.uniform(-1.0, 1.0);
  w /= w.norm();

  for (double g : {0.0, 1.0, 3.0}) {
    Md ws = w * g;
    auto critic = [&](const Var<double>& xhat) {
      return nn::matmul(constant<double>(Md(ws)), xhat);
    };
    Var<double> gp = gradient_penalty<double>(critic, real, fake, alphas);
    CHECK(std::abs(gp.scalar() - (g - 1.0) * (g - 1.0)) < 1e-6);
  }

  // constant critic: zero gradient everywhere, penalty (0-1)^2 = 1
  auto flat = [&](const Var<double>& xhat) {
    return constant<double>(Md::Constant(1, xhat.cols(), 3.5));
  };
  Var<double> gp = gradient_penalty<double>(flat, real, fake, alphas);
  CHECK(std::abs(gp.scalar() - 1.0) < 1e-6);
}

TEST_CASE("recon loss hand values") {
  Md a = Md::Ones(4, 3), b = Md::Zero(4, 3);
  CHECK(recon_loss(constant<double>(a), constant<double>(a)).scalar() == 0.0);
  CHECK(recon_loss(constant<double>(a), constant<double>(b)).scalar() ==
        doctest::Approx(1.0));
  Md c = Md::Constant(4, 3, 0.5);
  CHECK(recon_loss(constant<double>(a), constant<double>(c)).scalar() ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(recon_loss(constant<double>(a), constant<double>(Md::Zero(2, 2))),
                  Error);
}

TEST_CASE("total losses compose and reduce when lambdas vanish") {
  Var<double> critic = constant<double>(Md::Constant(1, 1, -1.0));
  Var<double> gen = constant<double>(Md::Constant(1, 1, 0.0));
  Var<double> gp = constant<double>(Md::Constant(1, 1, 0.25));
  Var<double> recon = constant<double>(Md::Constant(1, 1, 0.3));
  WganLosses<double> wl{critic, gen};

  auto zero = total_losses(wl, gp, recon, 0.0, 0.0);
  CHECK(zero.critic_total.scalar() == doctest::Approx(-1.0));
  CHECK(zero.generator_total.scalar() == doctest::Approx(0.0));

  auto t = total_losses(wl, gp, recon, 10.0, 10.0);
  CHECK(t.critic_total.scalar() == doctest::Approx(1.5));    // -1 + 10*0.25
  CHECK(t.generator_total.scalar() == doctest::Approx(3.0));  // 0 + 10*0.3
}

TEST_CASE("generator and critic shapes at a reduced configuration") {
  GanTrainConfig cfg = tiny_config(1);
  GeneratorNet<float> g(cfg.arch, 1);
  CriticNet<float> c(cfg.arch, 1);

  Mf cond(8, 2);
  cond.setConstant(0.5f);
  Rng drng(9);
  Var<float> out = g.forward(constant<float>(Mf(cond)), true, drng);
  CHECK(out.rows() == 16 * 16);
  CHECK(out.cols() == 2);
  CHECK(out.value().maxCoeff() <= 1.0f);
  CHECK(out.value().minCoeff() >= -1.0f);

  // dense seeds a 4x4 map with base*2^(stages-1) channels, then doubles twice
  const auto& shapes = g.last_shapes();
  REQUIRE(shapes.size() >= 4);
  CHECK(shapes[2].op == "reshape");
  CHECK(shapes[2].dims == std::vector<Eigen::Index>{2, 4, 4, 8});
  CHECK(shapes.back().op == "tanh");
  CHECK(shapes.back().dims == std::vector<Eigen::Index>{2, 16, 16, 1});

  Var<float> scores = c.forward(out, constant<float>(Mf(cond)));
  CHECK(scores.rows() == 1);
  CHECK(scores.cols() == 2);
  bool saw_concat = false;
  for (const auto& row : c.last_shapes())
    if (row.op == "concat") {
      saw_concat = true;
      CHECK(row.dims == std::vector<Eigen::Index>{2, 16, 16, 2});
    }
  CHECK(saw_concat);
}

TEST_CASE("zeroed output stage produces an all-zero spectrogram") {
  GanTrainConfig cfg = tiny_config(2);
  GeneratorNet<float> g(cfg.arch, 2);
  g.params.find("g.stage1.conv.W").node()->value.setZero();
  g.params.find("g.stage1.conv.b").node()->value.setZero();
  Rng drng(3);
  Var<float> out = g.forward(constant<float>(Mf::Constant(8, 3, 0.4f)), true, drng);
  CHECK(out.value().cwiseAbs().maxCoeff() == 0.0f);  // tanh(0) = 0
}

TEST_CASE("zeroed critic parameters score zero") {
  GanTrainConfig cfg = tiny_config(3);
  CriticNet<float> c(cfg.arch, 3);
  for (const auto& [name, v] : c.params.entries()) v.node()->value.setZero();
  Var<float> scores = c.forward(constant<float>(Mf::Constant(256, 4, 0.2f)),
                                constant<float>(Mf::Constant(8, 4, 0.5f)));
  CHECK(scores.value().cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("sampling is deterministic per seed and stochastic across seeds") {
  GanTrainConfig cfg = tiny_config(4);
  GeneratorNet<float> g(cfg.arch, 4);
  Mf cond = Mf::Constant(8, 3, 0.5f);
  Mf a = sample_generator(g, cond, 100);
  Mf b = sample_generator(g, cond, 100);
  Mf c = sample_generator(g, cond, 101);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0f);  // dropout noise differs
  CHECK(a.maxCoeff() <= 1.0f);
  CHECK(a.minCoeff() >= -1.0f);
}

TEST_CASE("training replays bit-identically under one seed") {
  auto run = [&](std::uint64_t seed) {
    GanTrainer<float> trainer(tiny_dataset(12, 7), tiny_config(seed));
    std::vector<TrainLogRow> rows;
    for (int i = 0; i < 5; ++i) rows.push_back(trainer.step());
    return std::make_pair(rows, snapshot_params(trainer.generator().params));
  };
  auto [rows_a, params_a] = run(11);
  auto [rows_b, params_b] = run(11);
  auto [rows_c, params_c] = run(12);

  REQUIRE(rows_a.size() == rows_b.size());
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    CHECK(rows_a[i].critic_total == rows_b[i].critic_total);
    CHECK(rows_a[i].generator_total == rows_b[i].generator_total);
    CHECK(rows_a[i].gp == rows_b[i].gp);
    CHECK(rows_a[i].recon == rows_b[i].recon);
  }
  for (std::size_t i = 0; i < params_a.size(); ++i)
    CHECK((params_a[i] - params_b[i]).cwiseAbs().maxCoeff() == 0.0f);

  bool any_diff = false;
  for (std::size_t i = 0; i < params_a.size(); ++i)
    any_diff |= (params_a[i] - params_c[i]).cwiseAbs().maxCoeff() > 0.0f;
  CHECK(any_diff);
}

TEST_CASE("checkpoint resume matches a straight-through run bit for bit") {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "melaug_gan_ckpt").string();
  std::filesystem::remove_all(dir);
  GanTrainConfig cfg = tiny_config(21);

  // straight run: 8 steps
  GanTrainer<float> straight(tiny_dataset(12, 9), cfg);
  std::vector<TrainLogRow> straight_rows;
  for (int i = 0; i < 8; ++i) straight_rows.push_back(straight.step());

  // checkpoint at 5, reload, continue to 8
  GanTrainer<float> first(tiny_dataset(12, 9), cfg);
  for (int i = 0; i < 5; ++i) first.step();
  pipeline::GanCheckpointInfo info{first.iteration(), cfg, {0.0, 1.0, "db"},
                                   {0.0, 1.0, "semitone"}};
  pipeline::save_gan_checkpoint(dir, first, info);

  GanTrainer<float> resumed(tiny_dataset(12, 9), cfg);
  pipeline::load_gan_checkpoint(dir, resumed);
  CHECK(resumed.iteration() == 5);
  std::vector<TrainLogRow> resumed_rows;
  for (int i = 0; i < 3; ++i) resumed_rows.push_back(resumed.step());

  for (int i = 0; i < 3; ++i) {
    CHECK(resumed_rows[i].iteration == straight_rows[5 + i].iteration);
    CHECK(resumed_rows[i].critic_total == straight_rows[5 + i].critic_total);
    CHECK(resumed_rows[i].generator_total == straight_rows[5 + i].generator_total);
    CHECK(resumed_rows[i].gp == straight_rows[5 + i].gp);
    CHECK(resumed_rows[i].recon == straight_rows[5 + i].recon);
  }
  auto pa = snapshot_params(straight.generator().params);
  auto pb = snapshot_params(resumed.generator().params);
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK((pa[i] - pb[i]).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("checkpoints round-trip bit exactly") {
  const std::string dir =
      (std::filesystem::temp_directory_path() / "melaug_gan_rt").string();
  std::filesystem::remove_all(dir);
  GanTrainConfig cfg = tiny_config(31);
  GanTrainer<float> trainer(tiny_dataset(10, 3), cfg);
  trainer.step();
  pipeline::GanCheckpointInfo info{trainer.iteration(), cfg, {-80.0, 0.0, "db"},
                                   {1.5, 30.25, "semitone"}};
  pipeline::save_gan_checkpoint(dir, trainer, info);

  auto read = pipeline::read_gan_checkpoint_info(dir);
  CHECK(read.iteration == 1);
  CHECK(read.spec_stats.min_value == -80.0);
  CHECK(read.f0_stats.max_value == 30.25);
  CHECK(read.config.arch.image_size == 16);

  GanTrainer<float> other(tiny_dataset(10, 3), cfg);
  pipeline::load_gan_checkpoint(dir, other);
  auto pa = snapshot_params(trainer.generator().params);
  auto pb = snapshot_params(other.generator().params);
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK((pa[i] - pb[i]).cwiseAbs().maxCoeff() == 0.0f);
  auto ca = snapshot_params(trainer.critic().params);
  auto cb = snapshot_params(other.critic().params);
  for (std::size_t i = 0; i < ca.size(); ++i)
    CHECK((ca[i] - cb[i]).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("smoke training keeps every logged loss finite") {
  GanTrainer<float> trainer(tiny_dataset(16, 5), tiny_config(41));
  for (int i = 0; i < 10; ++i) {
    TrainLogRow row = trainer.step();
    CHECK(std::isfinite(row.critic_total));
    CHECK(std::isfinite(row.generator_total));
    CHECK(std::isfinite(row.gp));
    CHECK(std::isfinite(row.recon));
  }
}

TEST_CASE("empty dataset is rejected") {
  GanDataset<float> empty;
  empty.specs.resize(16 * 16, 0);
  empty.conds.resize(8, 0);
  CHECK_THROWS_AS(GanTrainer<float>(empty, tiny_config(1)), Error);
}
