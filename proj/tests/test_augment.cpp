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

#include <unsupported/Eigen/FFT>
#include <complex>
#include <set>

#include "melaug/augment/spec_augment.hpp"
#include "melaug/augment/time_stretch.hpp"
#include "melaug/core/rng.hpp"

using namespace melaug;
using namespace melaug::augment;

namespace {

dsp::MelSpectrogram<float> random_spec(std::uint64_t seed) {
  Rng rng(seed);
  dsp::MelSpectrogram<float> spec;
  spec.domain = dsp::SpecDomain::db;
  spec.values.resize(128, 128);
  for (Eigen::Index i = 0; i < spec.values.size(); ++i)
    spec.values.data()[i] = static_cast<float>(rng.uniform(-80.0, 0.0));
  return spec;
}

audio::AudioClip sine(double hz, Eigen::Index n, int rate = 16000) {
  audio::AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    clip.samples[i] = 0.8f * static_cast<float>(std::sin(2.0 * M_PI * hz * i / rate));
  return clip;
}

double fft_peak_hz(const audio::AudioClip& clip) {
  const int n = 1 << 15;
  std::vector<double> x(n, 0.0);
  const Eigen::Index take = std::min<Eigen::Index>(n, clip.samples.size());
  for (Eigen::Index i = 0; i < take; ++i)
    x[i] = clip.samples[i] * (0.5 - 0.5 * std::cos(2.0 * M_PI * i / take));
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec(n);
  fft.fwd(spec, x);
  int best = 1;
  for (int k = 1; k < n / 2; ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return static_cast<double>(best) * clip.sample_rate / n;
}

}  // namespace

TEST_CASE("spec_augment with F=0 T=0 is the identity") {
  auto spec = random_spec(1);
  auto out = spec_augment(spec, SpecAugmentPolicy{0, 0, 1, 1}, 42);
  CHECK((out.values - spec.values).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("spec_augment rejects out-of-bounds policies and domains") {
  auto spec = random_spec(2);
  CHECK_THROWS_AS(spec_augment(spec, SpecAugmentPolicy{200, 20, 1, 1}, 1), Error);
  CHECK_THROWS_AS(spec_augment(spec, SpecAugmentPolicy{13, 200, 1, 1}, 1), Error);
  CHECK_THROWS_AS(spec_augment(spec, SpecAugmentPolicy{-1, 20, 1, 1}, 1), Error);
  dsp::MelSpectrogram<float> power = spec;
  power.domain = dsp::SpecDomain::power;
  CHECK_THROWS_AS(spec_augment(power, SpecAugmentPolicy{13, 20, 1, 1}, 1), Error);
}

TEST_CASE("one frequency mask paints a band with the matrix mean") {
  auto spec = random_spec(3);
  const float mean = spec.values.mean();
  auto out = spec_augment(spec, SpecAugmentPolicy{13, 0, 1, 0}, 7);
  CHECK(out.values.rows() == 128);
  CHECK(out.values.cols() == 128);

  // rows either untouched or fully painted with the mean
  int painted = 0;
  bool in_band = false;
  int band_runs = 0;
  for (int r = 0; r < 128; ++r) {
    const bool is_mean = (out.values.row(r).array() == mean).all();
    const bool changed = (out.values.row(r).array() != spec.values.row(r).array()).any();
    if (changed) CHECK(is_mean);
    if (changed) ++painted;
    if (changed && !in_band) ++band_runs;
    in_band = changed;
  }
  CHECK(painted <= 13);
  CHECK(band_runs <= 1);  // a single contiguous horizontal band
}

TEST_CASE("two time masks of width T alter at most 2T columns") {
  auto spec = random_spec(4);
  auto out = spec_augment(spec, SpecAugmentPolicy{0, 20, 0, 2}, 11);
  int altered = 0;
  for (int c = 0; c < 128; ++c)
    if ((out.values.col(c).array() != spec.values.col(c).array()).any()) ++altered;
  CHECK(altered <= 40);
}

TEST_CASE("spec_augment is deterministic per seed and varies across seeds") {
  auto spec = random_spec(5);
  SpecAugmentPolicy policy{13, 20, 1, 1};
  auto a = spec_augment(spec, policy, 123);
  auto b = spec_augment(spec, policy, 123);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0f);

  std::set<float> fingerprints;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto out = spec_augment(spec, policy, seed);
    fingerprints.insert(out.values.sum());
  }
  CHECK(fingerprints.size() > 90);  // collisions essentially never happen
}

TEST_CASE("time_stretch length follows 1/rate and rejects bad rates") {
  audio::AudioClip clip = sine(440.0, 32000);
  CHECK_THROWS_AS(time_stretch(clip, 0.4), Error);
  CHECK_THROWS_AS(time_stretch(clip, 1.5), Error);

  audio::AudioClip unit = time_stretch(clip, 1.0);
  CHECK(std::abs(unit.samples.size() - clip.samples.size()) <= 256);

  audio::AudioClip slow = time_stretch(clip, 0.5);
  CHECK(std::abs(slow.samples.size() - 64000) <= 512);
}

TEST_CASE("time_stretch preserves pitch within 2 percent") {
  audio::AudioClip clip = sine(440.0, 32000);
  audio::AudioClip out = time_stretch(clip, 1.25);
  CHECK(std::abs(fft_peak_hz(out) - 440.0) <= 0.02 * 440.0);
}

TEST_CASE("stretch then inverse rate restores the length within two hops") {
  audio::AudioClip clip = sine(330.0, 32000);
  audio::AudioClip there = time_stretch(clip, 1.25);
  audio::AudioClip back = time_stretch(there, 0.8);
  CHECK(std::abs(back.samples.size() - clip.samples.size()) <= 512);
}

TEST_CASE("pitch_shift bounds, identity and length preservation") {
  audio::AudioClip clip = sine(220.0, 33536);
  CHECK_THROWS_AS(pitch_shift(clip, 5), Error);
  CHECK_THROWS_AS(pitch_shift(clip, -5), Error);
  CHECK_THROWS_AS(pitch_shift(clip, 12), Error);  // +12 would double, out of range

  audio::AudioClip same = pitch_shift(clip, 0);
  CHECK(std::abs(fft_peak_hz(same) - 220.0) <= 0.02 * 220.0);
  CHECK(same.samples.size() == clip.samples.size());
}

TEST_CASE("pitch_shift moves a 220 Hz tone by the semitone factor") {
  audio::AudioClip clip = sine(220.0, 33536);
  audio::AudioClip up = pitch_shift(clip, 4);
  CHECK(up.samples.size() == clip.samples.size());
  const double expected = 220.0 * std::pow(2.0, 4.0 / 12.0);  // ~277.2 Hz
  CHECK(std::abs(fft_peak_hz(up) - expected) <= 0.02 * expected);

  audio::AudioClip down = pitch_shift(clip, -4);
  const double expected_down = 220.0 * std::pow(2.0, -4.0 / 12.0);
  CHECK(std::abs(fft_peak_hz(down) - expected_down) <= 0.02 * expected_down);
}

TEST_CASE("draw helpers are deterministic per seed with spread across seeds") {
  std::set<long> rates, steps;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const double r = stretch_rate_from_seed(s, 0.5, 1.5);
    CHECK(r == stretch_rate_from_seed(s, 0.5, 1.5));
    CHECK(r >= 0.5);
    CHECK(r < 1.5);
    rates.insert(std::lround(r * 1e12));
    const int n = pitch_steps_from_seed(s, -4, 4);
    CHECK(n == pitch_steps_from_seed(s, -4, 4));
    CHECK(n >= -4);
    CHECK(n <= 4);
    steps.insert(n);
  }
  CHECK(rates.size() > 90);
  CHECK(steps.size() == 9);  // all of [-4, 4] visited over 100 draws
}
