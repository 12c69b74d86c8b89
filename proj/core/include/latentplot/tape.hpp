/*
 * Copyright 2026 the latentplot authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "latentplot/params.hpp"
#include "latentplot/rng.hpp"
#include "latentplot/tensor.hpp"

namespace latentplot {

/// Handle to a tensor recorded on a Tape. Only meaningful together
/// with the tape that produced it.
struct Var {
  std::uint32_t id = 0xffffffff;
  bool valid() const { return id != 0xffffffff; }
};

/// Record of a forward computation. Operations append nodes; backward()
/// walks them once in reverse, accumulating adjoints. A tape is
/// single-threaded and single-shot: one backward per tape.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf owning its value.
  Var leaf(Tensor value, bool requires_grad = false);

  /// Leaf viewing external storage (parameters). The referenced tensor
  /// must outlive the tape and stay unmodified until backward finishes.
  Var leaf_ref(const Tensor& value, bool requires_grad = true);

  Var constant(Tensor value) { return leaf(std::move(value), false); }

  const Tensor& value(Var v) const;

  /// Adjoint of v; zeros if backward never reached it.
  /// Only valid after backward().
  const Tensor& grad(Var v);

  /// Reverse pass from a scalar loss. Errors on a non-scalar loss or a
  /// second call on the same tape.
  void backward(Var loss);

  bool backward_done() const { return backward_done_; }
  std::size_t node_count() const { return nodes_.size(); }

  // -- used by op implementations ------------------------------------
  Var emplace(Tensor value, bool needs_grad, std::function<void(Tape&)> pullback);
  bool needs_grad(Var v) const;
  Tensor& grad_acc(Var v);  // allocates the buffer on first touch

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;  // set for leaf_ref, else value is owned
    Tensor grad;
    bool has_grad_buf = false;
    bool needs_grad = false;
    std::function<void(Tape&)> pullback;

    const Tensor& val() const { return external ? *external : owned; }
  };
  std::vector<Node> nodes_;
  bool backward_done_ = false;

  const Node& node(Var v) const;
  Node& node(Var v);
};

// ---- primitives ------------------------------------------------------
// Every op validates shapes (the error names the op and the shapes) and
// rejects non-finite outputs.

Var matmul(Tape& t, Var a, Var b);
/// a @ b^T; used for attention scores and tied output projections.
Var matmul_nt(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
/// x(r,c) + bias(c), the one permitted broadcast.
Var add_bias(Tape& t, Var x, Var bias);
Var scale(Tape& t, Var x, double c);
/// x * s with s a scalar variable (learned gates).
Var mul_scalar(Tape& t, Var x, Var s);
Var relu(Tape& t, Var x);
/// Row-wise over the last axis.
Var softmax(Tape& t, Var x);
Var log_softmax(Tape& t, Var x);
Var layer_norm(Tape& t, Var x, Var gain, Var bias);
/// Rows of `table` selected by ids.
Var embedding_lookup(Tape& t, Var table, const std::vector<int>& ids);
Var concat(Tape& t, std::span<const Var> parts, int axis);
Var slice(Tape& t, Var x, int axis, std::size_t begin, std::size_t end);
/// Replaces entries where mask != 0 by `fill`. Mask size equals x size.
Var mask_fill(Tape& t, Var x, const std::vector<std::uint8_t>& mask, double fill);
/// Per-position negative log-likelihood: (L,V) logits, L targets -> (L,).
Var cross_entropy(Tape& t, Var logits, const std::vector<int>& targets);
Var sum(Tape& t, Var x);
Var mean(Tape& t, Var x);
/// Inverted dropout; identity (no node) when rate <= 0.
Var dropout(Tape& t, Var x, double rate, Rng& rng);

// ---- parameter binding ------------------------------------------------

/// Binds parameters onto one tape (each at most once) and moves tape
/// adjoints back into Param::grad after backward. A non-trainable
/// binder gives a gradient-free forward for evaluation.
class ParamBinder {
 public:
  explicit ParamBinder(Tape& tape, bool trainable = true)
      : tape_(&tape), trainable_(trainable) {}
  Var use(Param& p);
  /// p.grad += scale_factor * adjoint, for every bound parameter.
  void collect(double scale_factor = 1.0);

 private:
  Tape* tape_;
  bool trainable_;
  std::map<Param*, Var> bound_;
};

// ---- gradient checking -------------------------------------------------

struct GradCheckEntry {
  std::string param;
  double max_rel_err = 0.0;
  double analytic = 0.0;  // values at the worst coordinate
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  double epsilon = 0.0;

  bool pass(double tolerance) const { return max_rel_err < tolerance; }
};

/// Central-difference check of every parameter coordinate against the
/// tape gradient. `program` must rebuild the same scalar loss from the
/// current parameter values on each call.
GradCheckReport grad_check(
    ParamSet& params,
    const std::function<Var(Tape&, ParamBinder&)>& program,
    double epsilon = 1e-5);

}  // namespace latentplot
