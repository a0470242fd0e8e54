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

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "melaug/core/error.hpp"

namespace melaug::nn {

// Reverse-mode autodiff over Eigen dense matrices. Backward functions build
// graph nodes themselves, so gradients are differentiable again; that is what
// the WGAN gradient penalty needs (d/dtheta of an input-gradient norm).
//
// Convention: a matrix is (features x batch); column j is example j.

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Contiguous copy runs shared by gather/scatter (the one linear index-map op
// pair; im2col, upsampling, pooling, slicing and concatenation all lower to
// it). a_off < 0 means "zero fill" on gather / "skip" on scatter.
struct CopyRun {
  std::int64_t a_off;
  std::int64_t b_off;
  std::int32_t len;
};
using RunMap = std::vector<CopyRun>;
using RunMapPtr = std::shared_ptr<const RunMap>;

inline bool& grad_mode_flag() {
  thread_local bool enabled = true;
  return enabled;
}
inline bool grad_enabled() { return grad_mode_flag(); }

struct NoGradGuard {
  NoGradGuard() : prev_(grad_mode_flag()) { grad_mode_flag() = false; }
  ~NoGradGuard() { grad_mode_flag() = prev_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

template <typename S>
class Var;

template <typename S>
struct Node {
  MatX<S> value;
  std::uint64_t id = 0;
  bool requires_grad = false;
  std::vector<Var<S>> parents;
  // Appends grads for parents flagged in `needed` into `out` (same length as
  // parents; untouched entries stay undefined).
  std::function<void(const Var<S>& self, const Var<S>& grad,
                     const std::vector<char>& needed, std::vector<Var<S>>& out)>
      backward;
};

template <typename S>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<S>> node) : node_(std::move(node)) {}

  bool defined() const { return node_ != nullptr; }
  const MatX<S>& value() const { return node_->value; }
  MatX<S>& value() { return node_->value; }
  S scalar() const { return node_->value(0, 0); }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  bool requires_grad() const { return node_->requires_grad; }
  Node<S>* node() const { return node_.get(); }
  const std::shared_ptr<Node<S>>& ptr() const { return node_; }

 private:
  std::shared_ptr<Node<S>> node_;
};

namespace detail {
inline std::uint64_t next_node_id() {
  thread_local std::uint64_t counter = 0;
  return ++counter;
}
}  // namespace detail

template <typename S>
Var<S> make_leaf(MatX<S> value, bool requires_grad) {
  auto n = std::make_shared<Node<S>>();
  n->value = std::move(value);
  n->id = detail::next_node_id();
  n->requires_grad = requires_grad && grad_enabled();
  return Var<S>(n);
}

template <typename S>
Var<S> constant(MatX<S> value) {
  return make_leaf<S>(std::move(value), false);
}

template <typename S>
Var<S> leaf(MatX<S> value) {
  return make_leaf<S>(std::move(value), true);
}

// Trainable parameter: requires grad even when created under NoGradGuard
// (whether a forward pass records a graph is decided per op, not here).
template <typename S>
Var<S> param_leaf(MatX<S> value) {
  auto n = std::make_shared<Node<S>>();
  n->value = std::move(value);
  n->id = detail::next_node_id();
  n->requires_grad = true;
  return Var<S>(n);
}

template <typename S>
Var<S> detach(const Var<S>& a) {
  return constant<S>(a.value());
}

template <typename S, typename BackFn>
Var<S> make_op(MatX<S> value, std::vector<Var<S>> parents, BackFn&& fn) {
  auto n = std::make_shared<Node<S>>();
  n->value = std::move(value);
  n->id = detail::next_node_id();
  if (grad_enabled()) {
    for (const auto& p : parents)
      if (p.requires_grad()) {
        n->requires_grad = true;
        break;
      }
    if (n->requires_grad) {
      n->parents = std::move(parents);
      n->backward = std::forward<BackFn>(fn);
    }
  }
  return Var<S>(n);
}

// ---- primitive ops ----

template <typename S>
Var<S> matmul(const Var<S>& a, const Var<S>& b, bool ta = false, bool tb = false) {
  MatX<S> v;
  if (!ta && !tb)
    v.noalias() = a.value() * b.value();
  else if (ta && !tb)
    v.noalias() = a.value().transpose() * b.value();
  else if (!ta && tb)
    v.noalias() = a.value() * b.value().transpose();
  else
    v.noalias() = a.value().transpose() * b.value().transpose();
  return make_op<S>(
      std::move(v), {a, b},
      [ta, tb](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
               std::vector<Var<S>>& out) {
        const Var<S>& a = self.node()->parents[0];
        const Var<S>& b = self.node()->parents[1];
        if (!ta && !tb) {
          if (needed[0]) out[0] = matmul(g, b, false, true);
          if (needed[1]) out[1] = matmul(a, g, true, false);
        } else if (ta && !tb) {
          if (needed[0]) out[0] = matmul(b, g, false, true);
          if (needed[1]) out[1] = matmul(a, g, false, false);
        } else if (!ta && tb) {
          if (needed[0]) out[0] = matmul(g, b, false, false);
          if (needed[1]) out[1] = matmul(g, a, true, false);
        } else {
          if (needed[0]) out[0] = matmul(b, g, true, true);
          if (needed[1]) out[1] = matmul(g, a, true, true);
        }
      });
}

template <typename S>
Var<S> add(const Var<S>& a, const Var<S>& b) {
  return make_op<S>(
      a.value() + b.value(), {a, b},
      [](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = g;
        if (needed[1]) out[1] = g;
      });
}

template <typename S>
Var<S> scale(const Var<S>& a, S c) {
  return make_op<S>(
      (a.value().array() * c).matrix(), {a},
      [c](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
          std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = scale(g, c);
      });
}

template <typename S>
Var<S> neg(const Var<S>& a) {
  return scale(a, S(-1));
}

template <typename S>
Var<S> sub(const Var<S>& a, const Var<S>& b) {
  return make_op<S>(
      a.value() - b.value(), {a, b},
      [](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = g;
        if (needed[1]) out[1] = neg(g);
      });
}

template <typename S>
Var<S> add_scalar(const Var<S>& a, S c) {
  return make_op<S>(
      (a.value().array() + c).matrix(), {a},
      [](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = g;
      });
}

template <typename S>
Var<S> mul(const Var<S>& a, const Var<S>& b) {
  return make_op<S>(
      a.value().cwiseProduct(b.value()), {a, b},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        const Var<S>& a = self.node()->parents[0];
        const Var<S>& b = self.node()->parents[1];
        if (needed[0]) out[0] = mul(g, b);
        if (needed[1]) out[1] = mul(g, a);
      });
}

template <typename S>
Var<S> exp_(const Var<S>& a) {
  return make_op<S>(
      a.value().array().exp().matrix(), {a},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = mul(g, self);
      });
}

template <typename S>
Var<S> log_(const Var<S>& a) {
  return make_op<S>(
      a.value().array().log().matrix(), {a},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = mul(g, reciprocal(self.node()->parents[0]));
      });
}

template <typename S>
Var<S> reciprocal(const Var<S>& a) {
  return make_op<S>(
      a.value().cwiseInverse(), {a},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = neg(mul(g, mul(self, self)));
      });
}

template <typename S>
Var<S> sqrt_(const Var<S>& a) {
  return make_op<S>(
      a.value().cwiseSqrt(), {a},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = mul(g, scale(reciprocal(self), S(0.5)));
      });
}

template <typename S>
Var<S> tanh_(const Var<S>& a) {
  return make_op<S>(
      a.value().array().tanh().matrix(), {a},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = mul(g, add_scalar(neg(mul(self, self)), S(1)));
      });
}

template <typename S>
Var<S> sigmoid(const Var<S>& a) {
  MatX<S> v = a.value().unaryExpr([](S x) {
    return x >= S(0) ? S(1) / (S(1) + std::exp(-x))
                     : std::exp(x) / (S(1) + std::exp(x));
  });
  return make_op<S>(
      std::move(v), {a},
      [](const Var<S>& self, const Var<S>& g, const std::vector<char>& needed,
         std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = mul(g, mul(self, add_scalar(neg(self), S(1))));
      });
}

template <typename S>
Var<S> scatter_runs(const Var<S>& b, RunMapPtr map, Eigen::Index rows, Eigen::Index cols);

// B[b_off..b_off+len) = A[a_off..a_off+len), every B cell covered exactly once
// (runs with a_off < 0 fill with zeros), so the output needs no pre-clearing.
template <typename S>
Var<S> gather_runs(const Var<S>& a, RunMapPtr map, Eigen::Index rows, Eigen::Index cols) {
  MatX<S> v(rows, cols);
  {
    const S* src = a.value().data();
    S* dst = v.data();
    for (const CopyRun& r : *map) {
      if (r.a_off >= 0)
        std::copy(src + r.a_off, src + r.a_off + r.len, dst + r.b_off);
      else
        std::fill(dst + r.b_off, dst + r.b_off + r.len, S(0));
    }
  }
  const Eigen::Index ar = a.rows(), ac = a.cols();
  return make_op<S>(
      std::move(v), {a},
      [map, ar, ac](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
                    std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = scatter_runs(g, map, ar, ac);
      });
}

// A'[a_off..a_off+len) += B'[b_off..b_off+len); adjoint of gather_runs.
template <typename S>
Var<S> scatter_runs(const Var<S>& b, RunMapPtr map, Eigen::Index rows, Eigen::Index cols) {
  MatX<S> v = MatX<S>::Zero(rows, cols);
  {
    const S* src = b.value().data();
    S* dst = v.data();
    for (const CopyRun& r : *map)
      if (r.a_off >= 0)
        for (std::int32_t i = 0; i < r.len; ++i) dst[r.a_off + i] += src[r.b_off + i];
  }
  const Eigen::Index br = b.rows(), bc = b.cols();
  return make_op<S>(
      std::move(v), {b},
      [map, br, bc](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
                    std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = gather_runs(g, map, br, bc);
      });
}

// Same storage order, new logical shape.
template <typename S>
Var<S> reshape(const Var<S>& a, Eigen::Index rows, Eigen::Index cols) {
  require(rows * cols == a.rows() * a.cols(), ErrorCode::shape_mismatch,
          "reshape: element count mismatch");
  MatX<S> v = Eigen::Map<const MatX<S>>(a.value().data(), rows, cols);
  const Eigen::Index ar = a.rows(), ac = a.cols();
  return make_op<S>(
      std::move(v), {a},
      [ar, ac](const Var<S>&, const Var<S>& g, const std::vector<char>& needed,
               std::vector<Var<S>>& out) {
        if (needed[0]) out[0] = reshape(g, ar, ac);
      });
}

// ---- composed helpers ----

template <typename S>
Var<S> cmul(const Var<S>& a, MatX<S> mask) {
  return mul(a, constant<S>(std::move(mask)));
}

template <typename S>
Var<S> relu(const Var<S>& a) {
  return cmul(a, MatX<S>(a.value().unaryExpr([](S x) { return x > S(0) ? S(1) : S(0); })));
}

template <typename S>
Var<S> leaky_relu(const Var<S>& a, S alpha) {
  return cmul(a,
              MatX<S>(a.value().unaryExpr([alpha](S x) { return x > S(0) ? S(1) : alpha; })));
}

template <typename S>
Var<S> abs_(const Var<S>& a) {
  return cmul(a, MatX<S>(a.value().unaryExpr(
                     [](S x) { return x >= S(0) ? S(1) : S(-1); })));
}

template <typename S>
Var<S> square(const Var<S>& a) {
  return mul(a, a);
}

template <typename S>
Var<S> ones_const(Eigen::Index rows, Eigen::Index cols) {
  return constant<S>(MatX<S>::Ones(rows, cols));
}

template <typename S>
Var<S> colwise_sum(const Var<S>& a) {  // (d x n) -> (1 x n)
  return matmul(ones_const<S>(1, a.rows()), a);
}

template <typename S>
Var<S> rowwise_sum(const Var<S>& a) {  // (d x n) -> (d x 1)
  return matmul(a, ones_const<S>(a.cols(), 1));
}

template <typename S>
Var<S> sum_all(const Var<S>& a) {
  return colwise_sum(rowwise_sum(a));
}

template <typename S>
Var<S> mean_all(const Var<S>& a) {
  return scale(sum_all(a), S(1) / static_cast<S>(a.rows() * a.cols()));
}

template <typename S>
Var<S> broadcast_rows(const Var<S>& row, Eigen::Index rows) {  // (1 x n) -> (d x n)
  return matmul(ones_const<S>(rows, 1), row);
}

template <typename S>
Var<S> broadcast_cols(const Var<S>& col, Eigen::Index cols) {  // (d x 1) -> (d x n)
  return matmul(col, ones_const<S>(1, cols));
}

template <typename S>
Var<S> slice_rows(const Var<S>& a, Eigen::Index r0, Eigen::Index len) {
  auto map = std::make_shared<RunMap>();
  map->reserve(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    map->push_back({j * a.rows() + r0, j * len, static_cast<std::int32_t>(len)});
  return gather_runs(a, std::move(map), len, a.cols());
}

template <typename S>
Var<S> concat_rows(const Var<S>& a, const Var<S>& b) {
  const Eigen::Index da = a.rows(), db = b.rows(), n = a.cols();
  require(b.cols() == n, ErrorCode::shape_mismatch, "concat_rows: column mismatch");
  // scatter semantics: writes at a_off (the concatenated side), reads at b_off
  auto ma = std::make_shared<RunMap>();
  auto mb = std::make_shared<RunMap>();
  for (Eigen::Index j = 0; j < n; ++j) {
    ma->push_back({j * (da + db), j * da, static_cast<std::int32_t>(da)});
    mb->push_back({j * (da + db) + da, j * db, static_cast<std::int32_t>(db)});
  }
  return add(scatter_runs(a, std::move(ma), da + db, n),
             scatter_runs(b, std::move(mb), da + db, n));
}

// ---- backward pass ----

template <typename S>
using GradMap = std::unordered_map<const Node<S>*, Var<S>>;

// Gradients of a scalar root w.r.t. every reachable node that requires grad.
// When `targets` is non-empty, work is pruned to nodes that can still reach a
// target. Gradients are ordinary Vars, so they can be differentiated again.
template <typename S>
GradMap<S> backward(const Var<S>& root, const std::vector<Var<S>>& targets = {}) {
  require(root.defined() && root.requires_grad(), ErrorCode::invalid_argument,
          "backward: root does not require grad");

  // Topological collection of the ancestor subgraph.
  std::vector<Var<S>> order;
  std::unordered_set<const Node<S>*> seen;
  std::vector<Var<S>> stack{root};
  seen.insert(root.node());
  while (!stack.empty()) {
    Var<S> v = stack.back();
    stack.pop_back();
    for (const auto& p : v.node()->parents)
      if (p.requires_grad() && seen.insert(p.node()).second) stack.push_back(p);
    order.push_back(std::move(v));
  }
  std::sort(order.begin(), order.end(),
            [](const Var<S>& a, const Var<S>& b) { return a.node()->id > b.node()->id; });

  // Relevance: can this node reach one of the targets through parent edges?
  std::unordered_map<const Node<S>*, char> relevant;
  if (!targets.empty()) {
    for (const auto& t : targets) relevant[t.node()] = 1;
    // order is descending by id; parents have smaller ids than children, so a
    // reverse sweep resolves reachability bottom-up.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const Node<S>* n = it->node();
      if (relevant.count(n)) continue;
      for (const auto& p : n->parents)
        if (p.requires_grad() && relevant.count(p.node())) {
          relevant[n] = 1;
          break;
        }
    }
  }
  auto is_relevant = [&](const Node<S>* n) {
    return targets.empty() ? true : relevant.count(n) > 0;
  };

  GradMap<S> grads;
  grads.emplace(root.node(),
                constant<S>(MatX<S>::Ones(root.rows(), root.cols())));

  std::vector<char> needed;
  std::vector<Var<S>> parent_grads;
  for (const Var<S>& self : order) {
    Node<S>* n = self.node();
    auto it = grads.find(n);
    if (it == grads.end() || n->parents.empty()) continue;
    if (!is_relevant(n)) continue;
    const Var<S> g = it->second;
    const std::size_t np = n->parents.size();
    needed.assign(np, 0);
    bool any = false;
    for (std::size_t i = 0; i < np; ++i) {
      const auto& p = n->parents[i];
      needed[i] = p.requires_grad() && is_relevant(p.node());
      any |= static_cast<bool>(needed[i]);
    }
    if (!any) continue;
    parent_grads.assign(np, Var<S>());
    n->backward(self, g, needed, parent_grads);
    for (std::size_t i = 0; i < np; ++i) {
      if (!needed[i] || !parent_grads[i].defined()) continue;
      Node<S>* p = n->parents[i].node();
      auto git = grads.find(p);
      if (git == grads.end())
        grads.emplace(p, parent_grads[i]);
      else
        git->second = add(git->second, parent_grads[i]);
    }
  }
  return grads;
}

}  // namespace melaug::nn
