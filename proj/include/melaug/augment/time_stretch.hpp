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

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <vector>

#include "melaug/audio/audio.hpp"

namespace melaug::augment {

// Phase-vocoder time stretch: pitch is preserved, duration scales as 1/rate.
// Window 1024, hop 256.
inline audio::AudioClip time_stretch(const audio::AudioClip& clip, double rate) {
  require(rate >= 0.5 && rate < 1.5, ErrorCode::invalid_argument,
          "time_stretch: rate must lie in [0.5, 1.5)");
  constexpr int kWin = 1024;
  constexpr int kHop = 256;

  const Eigen::Index in_len = clip.samples.size();
  const Eigen::Index out_len = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(in_len) / rate));
  audio::AudioClip out;
  out.sample_rate = clip.sample_rate;
  if (in_len == 0) {
    out.samples.resize(0);
    return out;
  }

  // Analysis STFT at the synthesis hop.
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(std::max<Eigen::Index>(in_len, kWin));
  padded.head(in_len) = clip.samples.cast<double>();
  const int n_frames = 1 + static_cast<int>((padded.size() - kWin) / kHop);
  const int n_bins = kWin / 2 + 1;

  Eigen::VectorXd window(kWin);
  for (int i = 0; i < kWin; ++i)
    window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / kWin));

  Eigen::FFT<double> fft;
  std::vector<double> frame(kWin);
  std::vector<std::complex<double>> spec(kWin);
  Eigen::MatrixXcd stft(n_bins, n_frames);
  for (int t = 0; t < n_frames; ++t) {
    for (int i = 0; i < kWin; ++i) frame[i] = padded[t * kHop + i] * window[i];
    fft.fwd(spec, frame);
    for (int k = 0; k < n_bins; ++k) stft(k, t) = spec[k];
  }

  // Step through the analysis frames at `rate`, accumulating phase.
  const int n_out_frames = static_cast<int>(std::ceil(n_frames / rate));
  Eigen::VectorXd phase(n_bins), omega_hop(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    phase[k] = std::arg(stft(k, 0));
    omega_hop[k] = 2.0 * M_PI * k / kWin * kHop;
  }
  auto wrap_pi = [](double x) {
    x = std::fmod(x + M_PI, 2.0 * M_PI);
    if (x < 0) x += 2.0 * M_PI;
    return x - M_PI;
  };

  const Eigen::Index oa_len = static_cast<Eigen::Index>(n_out_frames - 1) * kHop + kWin;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(oa_len);
  Eigen::VectorXd wsum = Eigen::VectorXd::Zero(oa_len);
  std::vector<std::complex<double>> synth_spec(kWin);
  std::vector<double> synth_frame(kWin);

  for (int j = 0; j < n_out_frames; ++j) {
    const double t = j * rate;
    const int k0 = std::min(n_frames - 1, static_cast<int>(t));
    const int k1 = std::min(n_frames - 1, k0 + 1);
    const double frac = t - k0;
    for (int k = 0; k < n_bins; ++k) {
      const double mag =
          (1.0 - frac) * std::abs(stft(k, k0)) + frac * std::abs(stft(k, k1));
      synth_spec[k] = std::polar(mag, phase[k]);
      const double dphi =
          wrap_pi(std::arg(stft(k, k1)) - std::arg(stft(k, k0)) - omega_hop[k]);
      phase[k] = wrap_pi(phase[k] + omega_hop[k] + dphi);
    }
    for (int k = n_bins; k < kWin; ++k) synth_spec[k] = std::conj(synth_spec[kWin - k]);
    fft.inv(synth_frame, synth_spec);
    for (int i = 0; i < kWin; ++i) {
      acc[j * kHop + i] += synth_frame[i] * window[i];
      wsum[j * kHop + i] += window[i] * window[i];
    }
  }

  out.samples.setZero(out_len);
  const Eigen::Index copy_len = std::min(out_len, oa_len);
  for (Eigen::Index i = 0; i < copy_len; ++i)
    out.samples[i] = wsum[i] > 1e-9 ? static_cast<float>(acc[i] / wsum[i]) : 0.0f;
  return out;
}

inline double stretch_rate_from_seed(std::uint64_t seed, double lo, double hi) {
  return Rng::stream(seed, "time_stretch_rate").uniform(lo, hi);
}

// Pitch shift by n semitones at constant length: stretch time by 2^(n/12),
// then speed-change back via sample rate conversion.
inline audio::AudioClip pitch_shift(const audio::AudioClip& clip, int n_steps) {
  require(n_steps >= -4 && n_steps <= 4, ErrorCode::invalid_argument,
          "pitch_shift: n_steps must lie in [-4, 4]");
  if (n_steps == 0) return clip;
  const double s = std::pow(2.0, n_steps / 12.0);
  audio::AudioClip stretched = time_stretch(clip, 1.0 / s);
  const int inner_rate = static_cast<int>(std::lround(clip.sample_rate / s));
  audio::AudioClip shifted = audio::resample(stretched, inner_rate);
  shifted.sample_rate = clip.sample_rate;
  return audio::crop_or_pad(shifted, clip.samples.size(), audio::CropMode::center, 0);
}

inline int pitch_steps_from_seed(std::uint64_t seed, int lo, int hi) {
  return static_cast<int>(Rng::stream(seed, "pitch_shift_steps").uniform_int(lo, hi));
}

}  // namespace melaug::augment
