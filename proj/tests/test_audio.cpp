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
#include <filesystem>
#include <fstream>

#include "melaug/audio/audio.hpp"
#include "melaug/core/rng.hpp"

using namespace melaug;
using namespace melaug::audio;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("melaug_audio_" + name)).string();
}

AudioClip sine(double hz, int rate, Eigen::Index n, float amp = 0.9f) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    clip.samples[i] = amp * static_cast<float>(std::sin(2.0 * M_PI * hz * i / rate));
  return clip;
}

// Oracle: dominant frequency via a windowed zero-padded FFT.
double fft_peak_hz(const AudioClip& clip) {
  const int n = 1 << 14;
  std::vector<double> x(n, 0.0);
  const Eigen::Index take = std::min<Eigen::Index>(n, clip.samples.size());
  const Eigen::Index from = (clip.samples.size() - take) / 2;
  for (Eigen::Index i = 0; i < take; ++i)
    x[i] = clip.samples[from + i] * (0.5 - 0.5 * std::cos(2.0 * M_PI * i / take));
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec(n);
  fft.fwd(spec, x);
  int best = 1;
  for (int k = 1; k < n / 2; ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return static_cast<double>(best) * clip.sample_rate / n;
}

void write_raw_pcm16(const std::string& path, const std::vector<std::int16_t>& frames,
                     int channels, int rate) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  const std::uint32_t data_size = static_cast<std::uint32_t>(frames.size() * 2);
  out.write("RIFF", 4);
  u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * 2 * channels));
  u16(static_cast<std::uint16_t>(2 * channels));
  u16(16);
  out.write("data", 4);
  u32(data_size);
  out.write(reinterpret_cast<const char*>(frames.data()), data_size);
}

}  // namespace

TEST_CASE("read_wav decodes silence to zeros") {
  const std::string path = temp_path("silence.wav");
  write_raw_pcm16(path, std::vector<std::int16_t>(16000, 0), 1, 16000);
  AudioClip clip = read_wav(path);
  CHECK(clip.sample_rate == 16000);
  CHECK(clip.samples.size() == 16000);
  CHECK(clip.samples.cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("read_wav averages opposite stereo channels to zero") {
  const std::string path = temp_path("stereo.wav");
  std::vector<std::int16_t> frames;
  for (int i = 0; i < 1000; ++i) {
    frames.push_back(16384);   // +0.5
    frames.push_back(-16384);  // -0.5
  }
  write_raw_pcm16(path, frames, 2, 16000);
  AudioClip clip = read_wav(path);
  CHECK(clip.samples.size() == 1000);
  CHECK(clip.samples.cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("read_wav scales PCM value 16384 to amplitude 0.5") {
  const std::string path = temp_path("half.wav");
  write_raw_pcm16(path, std::vector<std::int16_t>(64, 16384), 1, 16000);
  AudioClip clip = read_wav(path);
  CHECK(clip.samples[0] == 0.5f);  // exactly 16384/32768
}

TEST_CASE("read_wav error values are distinct") {
  try {
    read_wav(temp_path("missing_nope.wav"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_file);
  }

  const std::string float_wav = temp_path("float.wav");
  {
    std::ofstream out(float_wav, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(3);  // IEEE float, not PCM
    u16(1);
    u32(16000);
    u32(64000);
    u16(4);
    u16(32);
    out.write("data", 4);
    u32(0);
  }
  try {
    read_wav(float_wav);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_encoding);
  }

  const std::string empty_wav = temp_path("empty.wav");
  write_raw_pcm16(empty_wav, {}, 1, 16000);
  try {
    read_wav(empty_wav);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_payload);
  }
}

TEST_CASE("pcm16 encode/decode round trip is bit exact") {
  Rng rng(11);
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(4096);
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i) {
    const auto q = static_cast<std::int16_t>(rng.uniform_int(-32768, 32767));
    clip.samples[i] = static_cast<float>(q) / 32768.0f;
  }
  const std::string path = temp_path("roundtrip.wav");
  write_wav(path, clip);
  AudioClip back = read_wav(path);
  REQUIRE(back.samples.size() == clip.samples.size());
  CHECK((back.samples - clip.samples).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("resample identity and length contracts") {
  AudioClip clip = sine(440.0, 16000, 16000);
  AudioClip same = resample(clip, 16000);
  CHECK(same.samples.size() == clip.samples.size());
  CHECK((same.samples - clip.samples).cwiseAbs().maxCoeff() == 0.0f);

  AudioClip at32k = sine(440.0, 32000, 32000);
  CHECK(resample(at32k, 16000).samples.size() == 16000);
  CHECK_THROWS_AS(resample(clip, 0), Error);
}

TEST_CASE("resample preserves a 440 Hz tone within one FFT bin") {
  AudioClip src = sine(440.0, 48000, 48000);
  AudioClip dst = resample(src, 16000);
  CHECK(dst.sample_rate == 16000);
  const double peak = fft_peak_hz(dst);
  const double bin = 16000.0 / (1 << 14);
  CHECK(std::abs(peak - 440.0) <= bin + 1e-9);
}

TEST_CASE("trim_silence removes exact-zero padding only") {
  AudioClip tone = sine(500.0, 16000, 8000, 0.5f);
  AudioClip padded;
  padded.sample_rate = 16000;
  padded.samples.setZero(8000 + 16000);
  padded.samples.segment(8000, 8000) = tone.samples;

  AudioClip trimmed = trim_silence(padded, 40.0);
  CHECK(trimmed.samples.size() >= 8000 - 400);  // within one analysis frame
  CHECK(trimmed.samples.size() <= 8000 + 800);
  CHECK(trimmed.samples.cwiseAbs().maxCoeff() > 0.4f);
}

TEST_CASE("trim_silence of an all-zero clip returns an empty clip") {
  AudioClip zeros;
  zeros.sample_rate = 16000;
  zeros.samples.setZero(16000);
  CHECK(trim_silence(zeros, 40.0).samples.size() == 0);
}

TEST_CASE("trim_silence keeps padding above the threshold") {
  Rng rng(5);
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(24000);
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] = 0.1f * static_cast<float>(rng.normal());
  for (Eigen::Index i = 8000; i < 16000; ++i)
    clip.samples[i] = static_cast<float>(0.9 * std::sin(2.0 * M_PI * 500.0 * i / 16000));

  // oracle: the padding RMS sits fewer than 40 dB under the tone RMS
  const double pad_rms =
      std::sqrt(clip.samples.head(8000).cast<double>().squaredNorm() / 8000);
  const double tone_rms =
      std::sqrt(clip.samples.segment(8000, 8000).cast<double>().squaredNorm() / 8000);
  REQUIRE(20.0 * std::log10(tone_rms / pad_rms) < 40.0);

  CHECK(trim_silence(clip, 40.0).samples.size() == clip.samples.size());
}

TEST_CASE("trim_silence never removes interior frames") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.setZero(32000);
  for (Eigen::Index i = 4000; i < 6000; ++i)
    clip.samples[i] = static_cast<float>(0.8 * std::sin(2.0 * M_PI * 800.0 * i / 16000));
  for (Eigen::Index i = 26000; i < 28000; ++i)
    clip.samples[i] = static_cast<float>(0.8 * std::sin(2.0 * M_PI * 800.0 * i / 16000));
  AudioClip trimmed = trim_silence(clip, 40.0);
  CHECK(trimmed.samples.size() <= clip.samples.size());
  CHECK(trimmed.samples.size() >= 24000 - 800);  // marker-to-marker span survives
  CHECK(trimmed.samples.cwiseAbs().maxCoeff() > 0.7f);
}

TEST_CASE("parse_segments accepts records and reports bad lines") {
  const std::string path = temp_path("segments.txt");
  {
    std::ofstream out(path);
    out << "u1 rec1 0.0 2.5\n\nu2 rec1 2.5 4.0\n";
  }
  auto segs = parse_segments(path);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].utterance_id == "u1");
  CHECK(segs[0].recording_id == "rec1");
  CHECK(segs[0].start == 0.0);
  CHECK(segs[0].end == 2.5);

  { std::ofstream out(path); }
  CHECK(parse_segments(path).empty());

  {
    std::ofstream out(path);
    out << "u1 rec1 3.0 2.0\n";
  }
  CHECK_THROWS_WITH_AS(parse_segments(path), doctest::Contains("line 1"), Error);

  {
    std::ofstream out(path);
    out << "u1 rec1 0.0\n";
  }
  CHECK_THROWS_WITH_AS(parse_segments(path), doctest::Contains("4 fields"), Error);

  {
    std::ofstream out(path);
    out << "u1 rec1 0.0 x\n";
  }
  CHECK_THROWS_WITH_AS(parse_segments(path), doctest::Contains("non-numeric"), Error);
}

TEST_CASE("crop_or_pad identity, centered padding and reproducible crops") {
  AudioClip clip = sine(300.0, 16000, 16000);
  AudioClip same = crop_or_pad(clip, 16000, CropMode::center, 1);
  CHECK((same.samples - clip.samples).cwiseAbs().maxCoeff() == 0.0f);

  AudioClip small = sine(300.0, 16000, 8000);
  AudioClip padded = crop_or_pad(small, 16000, CropMode::center, 1);
  REQUIRE(padded.samples.size() == 16000);
  CHECK(padded.samples.head(4000).cwiseAbs().maxCoeff() == 0.0f);
  CHECK(padded.samples.tail(4000).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((padded.samples.segment(4000, 8000) - small.samples).cwiseAbs().maxCoeff() ==
        0.0f);

  AudioClip big = sine(300.0, 16000, 40000);
  AudioClip a = crop_or_pad(big, 33536, CropMode::random, 99);
  AudioClip b = crop_or_pad(big, 33536, CropMode::random, 99);
  AudioClip c = crop_or_pad(big, 33536, CropMode::random, 100);
  REQUIRE(a.samples.size() == 33536);
  CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((a.samples - c.samples).cwiseAbs().maxCoeff() > 0.0f);

  CHECK_THROWS_AS(crop_or_pad(clip, 0, CropMode::center, 1), Error);
}

TEST_CASE("randomized crops are bit-reproducible across seeds") {
  AudioClip big = sine(250.0, 16000, 50000);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AudioClip a = crop_or_pad(big, 16000, CropMode::random, seed);
    AudioClip b = crop_or_pad(big, 16000, CropMode::random, seed);
    CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0f);
  }
}
