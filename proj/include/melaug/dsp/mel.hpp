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
#include "melaug/dsp/types.hpp"

namespace melaug::dsp {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Center frequencies (Hz) of the triangular filters, mel-spaced over
// [fmin, fmax]. Filter i spans centers i-1 .. i+1 of the extended grid.
inline std::vector<double> mel_filter_centers_hz(const DspConfig& cfg) {
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.fmax_hz);
  std::vector<double> centers(cfg.mel_bands + 2);
  for (int i = 0; i < cfg.mel_bands + 2; ++i)
    centers[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.mel_bands + 1));
  return centers;
}

// (mel_bands x fft_size/2+1) triangular filterbank, each triangle scaled to
// unit area (2 / bandwidth).
template <typename S>
MatX<S> mel_filterbank(const DspConfig& cfg) {
  const int n_bins = cfg.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.fft_size;
  const auto f = mel_filter_centers_hz(cfg);
  MatX<S> fb = MatX<S>::Zero(cfg.mel_bands, n_bins);
  for (int m = 0; m < cfg.mel_bands; ++m) {
    const double lo = f[m], mid = f[m + 1], hi = f[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < n_bins; ++k) {
      const double hz = k * bin_hz;
      double w = 0.0;
      if (hz > lo && hz < hi)
        w = hz <= mid ? (hz - lo) / (mid - lo) : (hi - hz) / (hi - mid);
      fb(m, k) = static_cast<S>(w * norm);
    }
  }
  return fb;
}

template <typename S>
VecX<S> hann_window(int n) {
  VecX<S> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = static_cast<S>(0.5 * (1.0 - std::cos(2.0 * M_PI * i / n)));
  return w;
}

// Power-domain mel spectrogram of a fixed-length clip: Hann-windowed STFT
// (no padding; the clip length contract supplies exactly cfg.frames windows),
// power spectrum, triangular filterbank.
template <typename S>
MelSpectrogram<S> mel_spectrogram(const audio::AudioClip& clip, const DspConfig& cfg,
                                  const MatX<S>* filterbank = nullptr) {
  require(clip.sample_rate == cfg.sample_rate, ErrorCode::invalid_argument,
          "mel_spectrogram: expected sample rate " + std::to_string(cfg.sample_rate));
  require(clip.samples.size() == cfg.clip_samples(), ErrorCode::invalid_argument,
          "mel_spectrogram: expected " + std::to_string(cfg.clip_samples()) +
              " samples, got " + std::to_string(clip.samples.size()));

  MatX<S> fb_local;
  if (!filterbank) {
    fb_local = mel_filterbank<S>(cfg);
    filterbank = &fb_local;
  }
  const int n_bins = cfg.fft_size / 2 + 1;
  const VecX<S> window = hann_window<S>(cfg.fft_size);

  Eigen::FFT<S> fft;
  std::vector<S> frame(cfg.fft_size);
  std::vector<std::complex<S>> spectrum(cfg.fft_size);

  MelSpectrogram<S> out;
  out.domain = SpecDomain::power;
  out.values.resize(cfg.mel_bands, cfg.frames);
  VecX<S> power(n_bins);
  for (int t = 0; t < cfg.frames; ++t) {
    for (int i = 0; i < cfg.fft_size; ++i)
      frame[i] = static_cast<S>(clip.samples[t * cfg.hop + i]) * window[i];
    fft.fwd(spectrum, frame);
    for (int k = 0; k < n_bins; ++k) power[k] = std::norm(spectrum[k]);
    out.values.col(t) = (*filterbank) * power;
  }
  return out;
}

// 10*log10 with a floor, clamped to the top db_range below the matrix maximum.
template <typename S>
MelSpectrogram<S> to_db(const MelSpectrogram<S>& spec, const DspConfig& cfg) {
  require(spec.domain == SpecDomain::power, ErrorCode::domain_mismatch,
          "to_db: input must be power-domain");
  MelSpectrogram<S> out;
  out.source_id = spec.source_id;
  out.domain = SpecDomain::db;
  const S floor_v = static_cast<S>(cfg.db_floor);
  out.values = spec.values.unaryExpr([floor_v](S v) {
    return static_cast<S>(S(10) * std::log10(std::max(v, floor_v)));
  });
  const S top = out.values.maxCoeff();
  out.values = out.values.cwiseMax(top - static_cast<S>(cfg.db_range));
  return out;
}

}  // namespace melaug::dsp
