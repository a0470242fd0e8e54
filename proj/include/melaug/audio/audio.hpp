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

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "melaug/core/error.hpp"

namespace melaug::audio {

// Mono waveform. Samples live in [-1, 1]; 16-bit PCM decodes as value/32768.
struct AudioClip {
  Eigen::VectorXf samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

struct Segment {
  std::string utterance_id;
  std::string recording_id;
  double start = 0.0;  // seconds
  double end = 0.0;    // seconds, > start
  std::optional<std::string> label;
};

// RIFF/WAVE, 16-bit PCM only. Multi-channel input is averaged to mono.
AudioClip read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioClip& clip);

// Windowed-sinc sample rate conversion; duration preserved within one sample.
AudioClip resample(const AudioClip& clip, int target_rate);

// Drops leading/trailing frames whose RMS sits more than threshold_db below
// the loudest frame. Frames are 25 ms with a 10 ms hop. Interior content is
// never touched; an all-silent clip comes back empty.
AudioClip trim_silence(const AudioClip& clip, double threshold_db = 40.0);

// One `<utt_id> <recording_id> <start_sec> <end_sec>` record per line.
std::vector<Segment> parse_segments(const std::string& path);

AudioClip cut_segment(const AudioClip& recording, const Segment& seg);

enum class CropMode { random, center };

// Returns exactly target_samples samples: a contiguous crop when longer,
// zero padding split per mode when shorter.
AudioClip crop_or_pad(const AudioClip& clip, Eigen::Index target_samples,
                      CropMode mode, std::uint64_t rng_seed);

}  // namespace melaug::audio
