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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "melaug/audio/audio.hpp"

namespace melaug::audio {

namespace {

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                     static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::missing_file, "cannot open wav file: " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    fail(ErrorCode::unsupported_encoding, "not a RIFF container: " + path);
  read_u32(in);  // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    fail(ErrorCode::unsupported_encoding, "not a WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;

  while (in.read(tag, 4)) {
    const std::uint32_t size = read_u32(in);
    if (!in) break;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      if (static_cast<std::uint32_t>(in.gcount()) != size)
        fail(ErrorCode::unsupported_encoding, "truncated data chunk: " + path);
      break;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);  // chunks are word-aligned
    }
  }

  if (!have_fmt) fail(ErrorCode::unsupported_encoding, "missing fmt chunk: " + path);
  if (format != 1 || bits != 16)
    fail(ErrorCode::unsupported_encoding,
         "only 16-bit PCM is supported (format=" + std::to_string(format) +
             ", bits=" + std::to_string(bits) + "): " + path);
  if (channels == 0 || rate == 0)
    fail(ErrorCode::unsupported_encoding, "bad fmt chunk: " + path);
  if (data.empty()) fail(ErrorCode::empty_payload, "zero-length data chunk: " + path);

  const Eigen::Index n_frames =
      static_cast<Eigen::Index>(data.size() / (2u * channels));
  if (n_frames == 0) fail(ErrorCode::empty_payload, "zero-length payload: " + path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(n_frames);
  const float scale = 1.0f / (32768.0f * channels);
  for (Eigen::Index i = 0; i < n_frames; ++i) {
    std::int32_t acc = 0;
    for (int c = 0; c < channels; ++c) {
      std::int16_t s;
      std::memcpy(&s, &data[2 * (i * channels + c)], 2);
      acc += s;
    }
    clip.samples[i] = static_cast<float>(acc) * scale;
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  require(clip.sample_rate > 0, ErrorCode::invalid_argument, "write_wav: bad sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write wav file: " + path);

  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_size = n * 2;
  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  write_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_size);
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i) {
    const float x = std::min(1.0f, std::max(-1.0f, clip.samples[i]));
    const long q = std::lround(static_cast<double>(x) * 32768.0);
    const std::int16_t s = static_cast<std::int16_t>(std::min(32767L, std::max(-32768L, q)));
    write_u16(out, static_cast<std::uint16_t>(s));
  }
  if (!out) fail(ErrorCode::io, "short write: " + path);
}

}  // namespace melaug::audio
