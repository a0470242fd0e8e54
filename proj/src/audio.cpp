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

#include <cmath>

#include "melaug/audio/audio.hpp"
#include "melaug/core/rng.hpp"

namespace melaug::audio {

namespace {
constexpr int kSincHalfWidth = 32;

double hann_sinc(double t, double cutoff, double half_width) {
  if (std::abs(t) >= half_width) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(M_PI * t / half_width));
  if (t == 0.0) return cutoff * window;
  const double x = M_PI * cutoff * t;
  return cutoff * (std::sin(x) / x) * window;
}
}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate) {
  require(target_rate > 0, ErrorCode::invalid_argument, "resample: target rate must be > 0");
  require(clip.sample_rate > 0, ErrorCode::invalid_argument, "resample: source rate must be > 0");
  if (target_rate == clip.sample_rate) return clip;

  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to source Nyquist
  const Eigen::Index in_len = clip.samples.size();
  const Eigen::Index out_len =
      static_cast<Eigen::Index>(std::llround(static_cast<double>(in_len) * ratio));

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.setZero(out_len);
  const double half_width = static_cast<double>(kSincHalfWidth) / cutoff;
  for (Eigen::Index n = 0; n < out_len; ++n) {
    const double center = static_cast<double>(n) / ratio;
    const Eigen::Index j0 = std::max<Eigen::Index>(
        0, static_cast<Eigen::Index>(std::ceil(center - half_width)));
    const Eigen::Index j1 = std::min<Eigen::Index>(
        in_len - 1, static_cast<Eigen::Index>(std::floor(center + half_width)));
    double acc = 0.0, ksum = 0.0;
    for (Eigen::Index j = j0; j <= j1; ++j) {
      const double k = hann_sinc(static_cast<double>(j) - center, cutoff, half_width);
      acc += k * clip.samples[j];
      ksum += k;
    }
    out.samples[n] = ksum != 0.0 ? static_cast<float>(acc / ksum) : 0.0f;
  }
  return out;
}

AudioClip trim_silence(const AudioClip& clip, double threshold_db) {
  require(threshold_db > 0.0, ErrorCode::invalid_argument,
          "trim_silence: threshold must be > 0 dB");
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  if (clip.samples.size() == 0) {
    out.samples.resize(0);
    return out;
  }

  const Eigen::Index frame = std::min<Eigen::Index>(
      clip.samples.size(), clip.sample_rate * 25 / 1000);
  const Eigen::Index hop = std::max<Eigen::Index>(1, clip.sample_rate * 10 / 1000);
  const Eigen::Index n_frames = 1 + (clip.samples.size() - frame) / hop;

  Eigen::VectorXd rms(n_frames);
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    const auto seg = clip.samples.segment(f * hop, frame).cast<double>();
    rms[f] = std::sqrt(seg.squaredNorm() / static_cast<double>(frame));
  }
  const double peak = rms.maxCoeff();
  const double floor_rms = peak * std::pow(10.0, -threshold_db / 20.0);

  Eigen::Index first = -1, last = -1;
  for (Eigen::Index f = 0; f < n_frames; ++f) {
    if (rms[f] > floor_rms) {
      if (first < 0) first = f;
      last = f;
    }
  }
  if (first < 0) {  // all silent
    out.samples.resize(0);
    return out;
  }
  const Eigen::Index lo = first * hop;
  // the final frame owns the uncovered tail remainder as well
  const Eigen::Index hi =
      last == n_frames - 1
          ? clip.samples.size()
          : std::min<Eigen::Index>(clip.samples.size(), last * hop + frame);
  out.samples = clip.samples.segment(lo, hi - lo);
  return out;
}

AudioClip crop_or_pad(const AudioClip& clip, Eigen::Index target_samples,
                      CropMode mode, std::uint64_t rng_seed) {
  require(target_samples > 0, ErrorCode::invalid_argument,
          "crop_or_pad: target must be > 0 samples");
  const Eigen::Index n = clip.samples.size();
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  if (n == target_samples) {
    out.samples = clip.samples;
    return out;
  }
  Rng rng = Rng::stream(rng_seed, "crop_or_pad");
  out.samples.setZero(target_samples);
  if (n > target_samples) {
    const Eigen::Index max_offset = n - target_samples;
    const Eigen::Index offset = mode == CropMode::center
                                    ? max_offset / 2
                                    : static_cast<Eigen::Index>(rng.uniform_int(0, max_offset));
    out.samples = clip.samples.segment(offset, target_samples);
  } else {
    const Eigen::Index pad = target_samples - n;
    const Eigen::Index left = mode == CropMode::center
                                  ? pad / 2
                                  : static_cast<Eigen::Index>(rng.uniform_int(0, pad));
    out.samples.segment(left, n) = clip.samples;
  }
  return out;
}

}  // namespace melaug::audio
