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

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "melaug/nn/serialize.hpp"
#include "melaug/pipeline/checkpoint_io.hpp"

namespace melaug::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json stats_to_json(const dsp::NormStats& s) {
  return json{{"min_value", s.min_value},
              {"max_value", s.max_value},
              {"domain_tag", s.domain_tag}};
}

dsp::NormStats stats_from_json(const json& j) {
  return {j.at("min_value").get<double>(), j.at("max_value").get<double>(),
          j.at("domain_tag").get<std::string>()};
}

json gan_config_to_json(const gan::GanTrainConfig& c) {
  return json{{"image_size", c.arch.image_size},
              {"cond_dim", c.arch.cond_dim},
              {"base_channels", c.arch.base_channels},
              {"stages", c.arch.stages},
              {"kernel_size", c.arch.kernel_size},
              {"dropout", c.arch.dropout_p},
              {"leaky_relu_alpha", c.arch.leaky_relu_alpha},
              {"lambda_gp", c.lambda_gp},
              {"lambda_recon", c.lambda_recon},
              {"learning_rate", c.learning_rate},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"batch_size", c.batch_size},
              {"iterations", c.iterations},
              {"critic_steps", c.critic_steps},
              {"checkpoint_interval", c.checkpoint_interval},
              {"log_interval", c.log_interval},
              {"sample_dropout", c.sample_dropout},
              {"cond_jitter", c.cond_jitter},
              {"seed", c.seed}};
}

gan::GanTrainConfig gan_config_from_json(const json& j) {
  gan::GanTrainConfig c;
  c.arch.image_size = j.at("image_size").get<int>();
  c.arch.cond_dim = j.at("cond_dim").get<int>();
  c.arch.base_channels = j.at("base_channels").get<int>();
  c.arch.stages = j.at("stages").get<int>();
  c.arch.kernel_size = j.at("kernel_size").get<int>();
  c.arch.dropout_p = j.at("dropout").get<double>();
  c.arch.leaky_relu_alpha = j.at("leaky_relu_alpha").get<double>();
  c.lambda_gp = j.at("lambda_gp").get<double>();
  c.lambda_recon = j.at("lambda_recon").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.iterations = j.at("iterations").get<std::int64_t>();
  c.critic_steps = j.at("critic_steps").get<int>();
  c.checkpoint_interval = j.at("checkpoint_interval").get<std::int64_t>();
  c.log_interval = j.at("log_interval").get<int>();
  c.sample_dropout = j.at("sample_dropout").get<bool>();
  c.cond_jitter = j.at("cond_jitter").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::bad_checkpoint, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::bad_checkpoint, "bad json in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << j.dump(2) << "\n";
}

void save_adam(nn::BlobWriter& blob, const std::string& prefix, nn::Adam<float>& adam) {
  for (std::size_t i = 0; i < adam.moment1().size(); ++i) {
    blob.add<float>(prefix + ".m." + std::to_string(i), adam.moment1()[i]);
    blob.add<float>(prefix + ".v." + std::to_string(i), adam.moment2()[i]);
  }
}

void load_adam(const nn::BlobReader& blob, const std::string& prefix,
               nn::Adam<float>& adam) {
  for (std::size_t i = 0; i < adam.moment1().size(); ++i) {
    adam.moment1()[i] = blob.get<float>(prefix + ".m." + std::to_string(i));
    adam.moment2()[i] = blob.get<float>(prefix + ".v." + std::to_string(i));
  }
}

}  // namespace

void save_gan_checkpoint(const std::string& dir, gan::GanTrainer<float>& trainer,
                         const GanCheckpointInfo& info) {
  fs::create_directories(dir);
  json meta{{"kind", "gan"},
            {"format_version", 1},
            {"scalar", "f32"},
            {"iteration", info.iteration},
            {"gan", gan_config_to_json(info.config)},
            {"spec_stats", stats_to_json(info.spec_stats)},
            {"f0_stats", stats_to_json(info.f0_stats)},
            {"adam_t_g", trainer.adam_g().t()},
            {"adam_t_c", trainer.adam_c().t()}};
  write_json_file(dir + "/meta.json", meta);

  nn::BlobWriter blob(dir + "/params.bin");
  nn::save_params(blob, trainer.generator().params);
  nn::save_params(blob, trainer.critic().params);
  for (auto& [name, mat] : trainer.generator().aux_state()) blob.add<float>(name, *mat);
  save_adam(blob, "adam_g", trainer.adam_g());
  save_adam(blob, "adam_c", trainer.adam_c());
  blob.finish();
}

GanCheckpointInfo read_gan_checkpoint_info(const std::string& dir) {
  const json meta = read_json_file(dir + "/meta.json");
  require(meta.value("kind", "") == "gan", ErrorCode::bad_checkpoint,
          dir + " is not a gan checkpoint");
  GanCheckpointInfo info;
  info.iteration = meta.at("iteration").get<std::int64_t>();
  info.config = gan_config_from_json(meta.at("gan"));
  info.spec_stats = stats_from_json(meta.at("spec_stats"));
  info.f0_stats = stats_from_json(meta.at("f0_stats"));
  return info;
}

void load_gan_checkpoint(const std::string& dir, gan::GanTrainer<float>& trainer) {
  const json meta = read_json_file(dir + "/meta.json");
  nn::BlobReader blob(dir + "/params.bin");
  nn::load_params(blob, trainer.generator().params);
  nn::load_params(blob, trainer.critic().params);
  for (auto& [name, mat] : trainer.generator().aux_state()) *mat = blob.get<float>(name);
  load_adam(blob, "adam_g", trainer.adam_g());
  load_adam(blob, "adam_c", trainer.adam_c());
  trainer.adam_g().set_t(meta.at("adam_t_g").get<std::int64_t>());
  trainer.adam_c().set_t(meta.at("adam_t_c").get<std::int64_t>());
  trainer.set_iteration(meta.at("iteration").get<std::int64_t>());
}

void load_generator(const std::string& dir, gan::GeneratorNet<float>& generator) {
  nn::BlobReader blob(dir + "/params.bin");
  nn::load_params(blob, generator.params);
  for (auto& [name, mat] : generator.aux_state()) *mat = blob.get<float>(name);
}

void save_crnn_checkpoint(const std::string& dir, const crnn::CrnnNet<float>& net,
                          const CrnnCheckpointInfo& info) {
  fs::create_directories(dir);
  json meta{{"kind", "crnn"},
            {"format_version", 1},
            {"scalar", "f32"},
            {"image_size", info.arch.image_size},
            {"channels", info.arch.channels},
            {"kernel_size", info.arch.kernel_size},
            {"leaky_relu_alpha", info.arch.leaky_relu_alpha},
            {"hidden_size", info.arch.hidden_size},
            {"num_classes", info.arch.num_classes},
            {"class_names", info.class_names},
            {"best_epoch", info.best_epoch},
            {"best_val_uar", info.best_val_uar}};
  write_json_file(dir + "/meta.json", meta);
  nn::BlobWriter blob(dir + "/params.bin");
  nn::save_params(blob, net.params);
  blob.finish();
}

CrnnCheckpointInfo read_crnn_checkpoint_info(const std::string& dir) {
  const json meta = read_json_file(dir + "/meta.json");
  require(meta.value("kind", "") == "crnn", ErrorCode::bad_checkpoint,
          dir + " is not a classifier checkpoint");
  CrnnCheckpointInfo info;
  info.arch.image_size = meta.at("image_size").get<int>();
  info.arch.channels = meta.at("channels").get<std::vector<int>>();
  info.arch.kernel_size = meta.at("kernel_size").get<int>();
  info.arch.leaky_relu_alpha = meta.at("leaky_relu_alpha").get<double>();
  info.arch.hidden_size = meta.at("hidden_size").get<int>();
  info.arch.num_classes = meta.at("num_classes").get<int>();
  info.class_names = meta.at("class_names").get<std::vector<std::string>>();
  info.best_epoch = meta.at("best_epoch").get<int>();
  info.best_val_uar = meta.at("best_val_uar").get<double>();
  return info;
}

void load_crnn_checkpoint(const std::string& dir, crnn::CrnnNet<float>& net) {
  nn::BlobReader blob(dir + "/params.bin");
  nn::load_params(blob, net.params);
}

std::vector<std::pair<std::int64_t, std::string>> list_gan_checkpoints(
    const std::string& gan_dir) {
  std::vector<std::pair<std::int64_t, std::string>> out;
  if (!fs::is_directory(gan_dir)) return out;
  for (const auto& entry : fs::directory_iterator(gan_dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("ckpt_", 0) != 0) continue;
    try {
      out.emplace_back(std::stoll(name.substr(5)), entry.path().string());
    } catch (const std::exception&) {
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace melaug::pipeline
