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

#pragma once

#include "melaug/audio/audio.hpp"
#include "melaug/data/manifest.hpp"

namespace melaug::data {

// Desk-scale synthetic corpus with three acoustically distinct classes:
//   class 0: harmonic stacks with F0 in 100-150 Hz and slow (2-4 Hz) AM
//   class 1: F0 in 200-300 Hz with fast (8-16 Hz) AM
//   class 2: alternating class-0/class-1 sections within each utterance,
//            imitating within-utterance code-switching
// plus per-example noise, gain, and spectral-tilt variation. Bit-reproducible
// under a fixed seed.
struct ToyConfig {
  std::vector<int> counts{300, 300, 300};  // aligned with class names
  Eigen::Index clip_samples = 33536;
  int sample_rate = 16000;
  double noise_db = -28.0;
  double noise_db_jitter = 4.0;
};

audio::AudioClip synth_toy_clip(int class_id, int index, std::uint64_t seed,
                                const ToyConfig& cfg);

// Section band plan of a class-2 clip (sample ranges and which F0 band each
// section uses); exposed so tests can check band alternation independently.
struct ToySection {
  Eigen::Index begin = 0, end = 0;
  int band = 0;  // 0 = low band, 1 = high band
};
std::vector<ToySection> toy_mixed_sections(int index, std::uint64_t seed,
                                           const ToyConfig& cfg);

// Writes one wav per example under audio_dir and returns the manifest (splits
// unassigned).
DatasetManifest synth_toy_corpus(const ToyConfig& cfg,
                                 const std::vector<std::string>& class_names,
                                 std::uint64_t seed, const std::string& audio_dir);

}  // namespace melaug::data
