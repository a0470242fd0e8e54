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

#include <fstream>
#include <sstream>

#include "melaug/audio/audio.hpp"

namespace melaug::audio {

std::vector<Segment> parse_segments(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::missing_file, "cannot open segments file: " + path);

  std::vector<Segment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string utt, rec, start_s, end_s, extra;
    if (!(ss >> utt)) continue;  // blank line
    if (!(ss >> rec >> start_s >> end_s) || (ss >> extra))
      fail(ErrorCode::parse,
           "segments line " + std::to_string(line_no) + ": expected 4 fields");
    Segment seg;
    seg.utterance_id = utt;
    seg.recording_id = rec;
    try {
      std::size_t p1 = 0, p2 = 0;
      seg.start = std::stod(start_s, &p1);
      seg.end = std::stod(end_s, &p2);
      if (p1 != start_s.size() || p2 != end_s.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(ErrorCode::parse,
           "segments line " + std::to_string(line_no) + ": non-numeric timestamp");
    }
    if (seg.start < 0.0)
      fail(ErrorCode::parse,
           "segments line " + std::to_string(line_no) + ": negative start time");
    if (seg.end <= seg.start)
      fail(ErrorCode::parse,
           "segments line " + std::to_string(line_no) + ": end <= start");
    out.push_back(std::move(seg));
  }
  return out;
}

AudioClip cut_segment(const AudioClip& recording, const Segment& seg) {
  const auto rate = recording.sample_rate;
  const Eigen::Index lo =
      std::min<Eigen::Index>(recording.samples.size(),
                             static_cast<Eigen::Index>(std::llround(seg.start * rate)));
  const Eigen::Index hi =
      std::min<Eigen::Index>(recording.samples.size(),
                             static_cast<Eigen::Index>(std::llround(seg.end * rate)));
  AudioClip out;
  out.sample_rate = rate;
  out.samples = recording.samples.segment(lo, std::max<Eigen::Index>(0, hi - lo));
  return out;
}

}  // namespace melaug::audio
