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
#include "melaug/dsp/norm.hpp"
#include "melaug/dsp/types.hpp"

namespace melaug::dsp {

// Semitones relative to 50 Hz. The 39.87 factor approximates 12/log10(2) and
// is used verbatim.
inline constexpr double kSemitoneScale = 39.87;
inline constexpr double kSemitoneRefHz = 50.0;

template <typename S>
VecX<S> semitone(const VecX<S>& f0_hz) {
  VecX<S> st(f0_hz.size());
  for (Eigen::Index i = 0; i < f0_hz.size(); ++i) {
    const double f = static_cast<double>(f0_hz[i]);
    require(f >= 0.0, ErrorCode::invalid_argument, "semitone: negative F0");
    st[i] = f == 0.0 ? S(0)
                     : static_cast<S>(kSemitoneScale * std::log10(f / kSemitoneRefHz));
  }
  return st;
}

template <typename S>
VecX<S> semitone(const F0Contour<S>& f0) {
  return semitone<S>(f0.hz);
}

// Min-max stats over the voiced (nonzero) entries of a semitone corpus.
template <typename S>
NormStats fit_semitone_stats(const std::vector<VecX<S>>& semitone_contours) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& st : semitone_contours)
    for (Eigen::Index i = 0; i < st.size(); ++i)
      if (st[i] != S(0)) {
        lo = std::min(lo, static_cast<double>(st[i]));
        hi = std::max(hi, static_cast<double>(st[i]));
      }
  require(hi > lo, ErrorCode::invalid_argument,
          "fit_semitone_stats: no voiced frames or degenerate range");
  return NormStats{lo, hi, "semitone"};
}

// Voiced frames map affinely onto [0, 1] (clamped); unvoiced frames stay 0.
template <typename S>
ConditioningVector<S> normalize_f0(const VecX<S>& st, const NormStats& stats) {
  require(stats.valid(), ErrorCode::invalid_argument, "normalize_f0: invalid stats");
  ConditioningVector<S> out;
  out.values.resize(st.size());
  const double span = stats.max_value - stats.min_value;
  for (Eigen::Index i = 0; i < st.size(); ++i) {
    if (st[i] == S(0)) {
      out.values[i] = S(0);
      continue;
    }
    const double u = (static_cast<double>(st[i]) - stats.min_value) / span;
    out.values[i] = static_cast<S>(std::min(1.0, std::max(0.0, u)));
  }
  return out;
}

// Frame-synchronous F0 track via normalized autocorrelation (FFT-based), peak
// search restricted to the configured band, frames below the voicing
// threshold marked 0. Framing matches mel_spectrogram exactly.
template <typename S>
F0Contour<S> extract_f0(const audio::AudioClip& clip, const DspConfig& cfg,
                        const F0Config& f0cfg = {}) {
  require(clip.sample_rate == cfg.sample_rate, ErrorCode::invalid_argument,
          "extract_f0: expected sample rate " + std::to_string(cfg.sample_rate));
  require(clip.samples.size() == cfg.clip_samples(), ErrorCode::invalid_argument,
          "extract_f0: expected " + std::to_string(cfg.clip_samples()) + " samples");

  const int w = cfg.fft_size;
  const int padded = 2 * w;
  const int lag_min = std::max(1, static_cast<int>(std::floor(cfg.sample_rate / f0cfg.fmax_hz)));
  const int lag_max = std::min(w - 1, static_cast<int>(std::ceil(cfg.sample_rate / f0cfg.fmin_hz)));

  Eigen::FFT<double> fft;
  std::vector<double> frame(padded, 0.0);
  std::vector<std::complex<double>> spectrum(padded);
  std::vector<double> ac(padded);
  Eigen::VectorXd energy_prefix(w + 1);

  F0Contour<S> out;
  out.frame_rate = static_cast<double>(cfg.sample_rate) / cfg.hop;
  out.hz.setZero(cfg.frames);

  for (int t = 0; t < cfg.frames; ++t) {
    double mean = 0.0;
    for (int i = 0; i < w; ++i) mean += clip.samples[t * cfg.hop + i];
    mean /= w;
    for (int i = 0; i < w; ++i) frame[i] = clip.samples[t * cfg.hop + i] - mean;
    std::fill(frame.begin() + w, frame.end(), 0.0);

    fft.fwd(spectrum, frame);
    for (auto& c : spectrum) c = std::complex<double>(std::norm(c), 0.0);
    std::vector<std::complex<double>> corr(padded);
    fft.inv(corr, spectrum);
    for (int i = 0; i < padded; ++i) ac[i] = corr[i].real();

    energy_prefix[0] = 0.0;
    for (int i = 0; i < w; ++i) energy_prefix[i + 1] = energy_prefix[i] + frame[i] * frame[i];
    const double total_energy = energy_prefix[w];
    if (total_energy <= 0.0) continue;  // silent frame: unvoiced

    auto nac = [&](int lag) {
      const double e0 = energy_prefix[w - lag];
      const double e1 = total_energy - energy_prefix[lag];
      const double denom = std::sqrt(e0 * e1);
      return denom > 0.0 ? ac[lag] / denom : 0.0;
    };

    double best = -1.0;
    for (int lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, nac(lag));
    if (best < f0cfg.voicing_threshold) continue;

    // Shortest lag competitive with the global peak, to avoid octave errors.
    int pick = -1;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      const double v = nac(lag);
      const bool local_max = v >= nac(std::max(1, lag - 1)) && v >= nac(lag + 1);
      if (local_max && v >= 0.85 * best) {
        pick = lag;
        break;
      }
    }
    if (pick < 0) continue;

    // Parabolic refinement around the integer lag.
    double lag_ref = pick;
    const double l = nac(pick - 1), c = nac(pick), r = nac(pick + 1);
    const double denom = l - 2.0 * c + r;
    if (std::abs(denom) > 1e-12) {
      const double delta = 0.5 * (l - r) / denom;
      if (std::abs(delta) < 1.0) lag_ref += delta;
    }
    const double hz =
        std::min(f0cfg.fmax_hz, std::max(f0cfg.fmin_hz, cfg.sample_rate / lag_ref));
    out.hz[t] = static_cast<S>(hz);
  }
  return out;
}

}  // namespace melaug::dsp
