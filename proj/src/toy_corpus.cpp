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
#include <cmath>
#include <filesystem>

#include "melaug/core/rng.hpp"
#include "melaug/data/toy.hpp"

namespace melaug::data {

namespace {

constexpr double kLowBand[2] = {100.0, 150.0};
constexpr double kHighBand[2] = {200.0, 300.0};
constexpr double kLowAm[2] = {2.0, 4.0};
constexpr double kHighAm[2] = {8.0, 16.0};

Rng clip_rng(std::uint64_t seed, int class_id, int index) {
  return Rng::stream(seed, "toy_clip", static_cast<std::uint64_t>(class_id),
                     static_cast<std::uint64_t>(index));
}

struct SectionPlan {
  Eigen::Index begin, end;
  int band;
  double f_start, f_end;  // linear F0 glide across the section
  double am_rate, am_phase;
};

std::vector<SectionPlan> plan_sections(int class_id, Rng& rng, const ToyConfig& cfg) {
  std::vector<SectionPlan> plan;
  auto band_of = [&](int b) { return b == 0 ? kLowBand : kHighBand; };
  auto am_of = [&](int b) { return b == 0 ? kLowAm : kHighAm; };

  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
  std::vector<int> bands;
  if (class_id == 2) {
    const int n_sec = static_cast<int>(rng.uniform_int(3, 6));
    const int start_band = static_cast<int>(rng.uniform_int(0, 1));
    // roughly equal sections with jittered boundaries
    std::vector<Eigen::Index> bounds{0};
    for (int s = 1; s < n_sec; ++s) {
      const double frac = (s + rng.uniform(-0.25, 0.25)) / n_sec;
      bounds.push_back(static_cast<Eigen::Index>(frac * cfg.clip_samples));
    }
    bounds.push_back(cfg.clip_samples);
    std::sort(bounds.begin(), bounds.end());
    for (int s = 0; s < n_sec; ++s) {
      ranges.emplace_back(bounds[s], bounds[s + 1]);
      bands.push_back((start_band + s) % 2);
    }
  } else {
    ranges.emplace_back(0, cfg.clip_samples);
    bands.push_back(class_id);
  }

  for (std::size_t s = 0; s < ranges.size(); ++s) {
    SectionPlan p;
    p.begin = ranges[s].first;
    p.end = ranges[s].second;
    p.band = bands[s];
    const double* b = band_of(p.band);
    const double* am = am_of(p.band);
    p.f_start = rng.uniform(b[0], b[1]);
    p.f_end = rng.uniform(b[0], b[1]);
    p.am_rate = rng.uniform(am[0], am[1]);
    p.am_phase = rng.uniform(0.0, 2.0 * M_PI);
    plan.push_back(p);
  }
  return plan;
}

}  // namespace

std::vector<ToySection> toy_mixed_sections(int index, std::uint64_t seed,
                                           const ToyConfig& cfg) {
  Rng rng = clip_rng(seed, 2, index);
  const auto plan = plan_sections(2, rng, cfg);
  std::vector<ToySection> out;
  for (const auto& p : plan) out.push_back({p.begin, p.end, p.band});
  return out;
}

audio::AudioClip synth_toy_clip(int class_id, int index, std::uint64_t seed,
                                const ToyConfig& cfg) {
  require(class_id >= 0 && class_id <= 2, ErrorCode::invalid_argument,
          "synth_toy_clip: class id out of range");
  Rng rng = clip_rng(seed, class_id, index);
  const auto plan = plan_sections(class_id, rng, cfg);

  constexpr int kHarmonics = 6;
  const double tilt = rng.uniform(1.0, 1.6);
  double amps[kHarmonics], phases[kHarmonics];
  double amp_sum = 0.0;
  for (int k = 0; k < kHarmonics; ++k) {
    amps[k] = std::pow(k + 1.0, -tilt);
    amp_sum += amps[k];
    phases[k] = rng.uniform(0.0, 2.0 * M_PI);
  }
  for (int k = 0; k < kHarmonics; ++k) amps[k] /= amp_sum;

  const double gain = rng.uniform(0.35, 0.85);
  const double am_depth = rng.uniform(0.5, 0.8);
  const double noise_db = cfg.noise_db + rng.uniform(-cfg.noise_db_jitter,
                                                     cfg.noise_db_jitter);
  const double noise_sigma = std::pow(10.0, noise_db / 20.0);
  const Eigen::Index fade = cfg.sample_rate / 20;  // 50 ms

  audio::AudioClip clip;
  clip.sample_rate = cfg.sample_rate;
  clip.samples.setZero(cfg.clip_samples);

  double phase = 0.0;
  for (const auto& sec : plan) {
    const double sec_len = static_cast<double>(sec.end - sec.begin);
    for (Eigen::Index t = sec.begin; t < sec.end; ++t) {
      const double u = (t - sec.begin) / sec_len;
      const double f0 = sec.f_start + (sec.f_end - sec.f_start) * u;
      phase += 2.0 * M_PI * f0 / cfg.sample_rate;
      const double tsec = static_cast<double>(t) / cfg.sample_rate;
      const double am =
          1.0 - am_depth * (0.5 + 0.5 * std::sin(2.0 * M_PI * sec.am_rate * tsec +
                                                 sec.am_phase));
      double v = 0.0;
      for (int k = 0; k < kHarmonics; ++k)
        v += amps[k] * std::sin((k + 1) * phase + phases[k]);
      clip.samples[t] = static_cast<float>(gain * am * v);
    }
  }
  for (Eigen::Index t = 0; t < cfg.clip_samples; ++t) {
    double env = 1.0;
    if (t < fade) env = 0.5 * (1.0 - std::cos(M_PI * t / fade));
    const Eigen::Index from_end = cfg.clip_samples - 1 - t;
    if (from_end < fade) env *= 0.5 * (1.0 - std::cos(M_PI * from_end / fade));
    double v = clip.samples[t] * env + noise_sigma * rng.normal();
    clip.samples[t] = static_cast<float>(std::min(1.0, std::max(-1.0, v)));
  }
  return clip;
}

DatasetManifest synth_toy_corpus(const ToyConfig& cfg,
                                 const std::vector<std::string>& class_names,
                                 std::uint64_t seed, const std::string& audio_dir) {
  require(class_names.size() == cfg.counts.size(), ErrorCode::invalid_argument,
          "synth_toy_corpus: counts must align with class names");
  require(std::all_of(cfg.counts.begin(), cfg.counts.end(), [](int c) { return c > 0; }),
          ErrorCode::invalid_argument, "synth_toy_corpus: zero counts");
  std::filesystem::create_directories(audio_dir);

  DatasetManifest manifest;
  manifest.class_names = class_names;
  manifest.seed = seed;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    for (int i = 0; i < cfg.counts[c]; ++i) {
      audio::AudioClip clip = synth_toy_clip(static_cast<int>(c), i, seed, cfg);
      LabeledExample e;
      e.id = "toy_" + std::to_string(c) + "_" + std::to_string(i);
      e.path = audio_dir + "/" + e.id + ".wav";
      e.label = class_names[c];
      e.duration = clip.duration_seconds();
      audio::write_wav(e.path, clip);
      manifest.examples.push_back(std::move(e));
    }
  }
  return manifest;
}

}  // namespace melaug::data
