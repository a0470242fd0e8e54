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

#include "melaug/nn/layers.hpp"

namespace melaug::nn {

template <typename S>
class Adam {
 public:
  Adam() = default;
  Adam(const ParamStore<S>& params, double lr, double beta1, double beta2,
       double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& [name, v] : params.entries()) {
      m_.push_back(MatX<S>::Zero(v.rows(), v.cols()));
      v_.push_back(MatX<S>::Zero(v.rows(), v.cols()));
    }
  }

  void step(const GradMap<S>& grads, const ParamStore<S>& params) {
    ++t_;
    const S bc1 = static_cast<S>(1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const S bc2 = static_cast<S>(1.0 - std::pow(beta2_, static_cast<double>(t_)));
    const auto& entries = params.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto it = grads.find(entries[i].second.node());
      if (it == grads.end()) continue;
      const MatX<S>& g = it->second.value();
      m_[i] = static_cast<S>(beta1_) * m_[i] + static_cast<S>(1.0 - beta1_) * g;
      v_[i].array() =
          static_cast<S>(beta2_) * v_[i].array() +
          static_cast<S>(1.0 - beta2_) * g.array().square();
      entries[i].second.node()->value.array() -=
          static_cast<S>(lr_) * (m_[i].array() / bc1) /
          ((v_[i].array() / bc2).sqrt() + static_cast<S>(eps_));
    }
  }

  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }
  std::vector<MatX<S>>& moment1() { return m_; }
  std::vector<MatX<S>>& moment2() { return v_; }
  const std::vector<MatX<S>>& moment1() const { return m_; }
  const std::vector<MatX<S>>& moment2() const { return v_; }

 private:
  double lr_ = 1e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<MatX<S>> m_, v_;
};

}  // namespace melaug::nn
