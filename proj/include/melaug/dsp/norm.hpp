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

#include <string>
#include <vector>

#include "melaug/dsp/types.hpp"

namespace melaug::dsp {

// Global min-max statistics; stored in double so the serialized decimal form
// round-trips bit-exactly.
struct NormStats {
  double min_value = 0.0;
  double max_value = 0.0;
  std::string domain_tag;

  bool valid() const { return max_value > min_value; }
};

template <typename S>
NormStats fit_minmax(const std::vector<MelSpectrogram<S>>& specs) {
  require(!specs.empty(), ErrorCode::invalid_argument, "fit_minmax: empty input");
  const SpecDomain domain = specs.front().domain;
  NormStats stats;
  stats.domain_tag = domain_name(domain);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : specs) {
    require(s.domain == domain, ErrorCode::domain_mismatch,
            "fit_minmax: mixed spectrogram domains");
    lo = std::min(lo, static_cast<double>(s.values.minCoeff()));
    hi = std::max(hi, static_cast<double>(s.values.maxCoeff()));
  }
  stats.min_value = lo;
  stats.max_value = hi;
  require(stats.valid(), ErrorCode::invalid_argument,
          "fit_minmax: degenerate range (max == min)");
  return stats;
}

// Columns of a big matrix treated as flattened spectrograms.
template <typename S>
NormStats fit_minmax(const MatX<S>& values, const std::string& domain_tag) {
  require(values.size() > 0, ErrorCode::invalid_argument, "fit_minmax: empty input");
  NormStats stats;
  stats.domain_tag = domain_tag;
  stats.min_value = static_cast<double>(values.minCoeff());
  stats.max_value = static_cast<double>(values.maxCoeff());
  require(stats.valid(), ErrorCode::invalid_argument,
          "fit_minmax: degenerate range (max == min)");
  return stats;
}

template <typename S>
MatX<S> apply_minmax_values(const MatX<S>& values, const NormStats& stats,
                            SpecDomain target) {
  require(stats.valid(), ErrorCode::invalid_argument, "apply_minmax: invalid stats");
  require(target == SpecDomain::norm_pm1 || target == SpecDomain::norm_01,
          ErrorCode::invalid_argument, "apply_minmax: target must be a normalized domain");
  const S lo = static_cast<S>(stats.min_value);
  const S span = static_cast<S>(stats.max_value - stats.min_value);
  MatX<S> unit = ((values.array() - lo) / span).cwiseMax(S(0)).cwiseMin(S(1));
  if (target == SpecDomain::norm_01) return unit;
  return (unit.array() * S(2) - S(1)).matrix();
}

template <typename S>
MatX<S> invert_minmax_values(const MatX<S>& values, const NormStats& stats,
                             SpecDomain source) {
  require(stats.valid(), ErrorCode::invalid_argument, "invert_minmax: invalid stats");
  require(source == SpecDomain::norm_pm1 || source == SpecDomain::norm_01,
          ErrorCode::invalid_argument, "invert_minmax: source must be a normalized domain");
  const S lo = static_cast<S>(stats.min_value);
  const S span = static_cast<S>(stats.max_value - stats.min_value);
  if (source == SpecDomain::norm_01) return (values.array() * span + lo).matrix();
  return (((values.array() + S(1)) / S(2)) * span + lo).matrix();
}

template <typename S>
MelSpectrogram<S> apply_minmax(const MelSpectrogram<S>& spec, const NormStats& stats,
                               SpecDomain target) {
  MelSpectrogram<S> out;
  out.source_id = spec.source_id;
  out.domain = target;
  out.values = apply_minmax_values<S>(spec.values, stats, target);
  return out;
}

template <typename S>
MelSpectrogram<S> invert_minmax(const MelSpectrogram<S>& spec, const NormStats& stats) {
  MelSpectrogram<S> out;
  out.source_id = spec.source_id;
  out.domain = SpecDomain::db;
  out.values = invert_minmax_values<S>(spec.values, stats, spec.domain);
  return out;
}

}  // namespace melaug::dsp
