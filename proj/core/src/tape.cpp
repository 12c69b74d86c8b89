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

#include "latentplot/tape.hpp"

#include <cmath>
#include <cstring>

#include "latentplot/common.hpp"
#include "latentplot/linalg.hpp"

namespace latentplot {

namespace {

void check_finite(const Tensor& v, const char* op) {
  if (!v.all_finite())
    throw Error(std::string(op) + ": non-finite values in forward result");
}

void require_rank2(const Tensor& v, const char* op) {
  if (v.shape().size() != 2)
    throw Error(std::string(op) + ": expected a rank-2 tensor, got " +
                shape_str(v.shape()));
}

}  // namespace

// ---- Tape ---------------------------------------------------------------

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node n;
  n.owned = std::move(value);
  n.needs_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::leaf_ref(const Tensor& value, bool requires_grad) {
  Node n;
  n.external = &value;
  n.needs_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::emplace(Tensor value, bool needs_grad,
                  std::function<void(Tape&)> pullback) {
  Node n;
  n.owned = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.pullback = std::move(pullback);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size())
    throw Error("tape: invalid variable handle");
  return nodes_[v.id];
}

Tape::Node& Tape::node(Var v) {
  if (!v.valid() || v.id >= nodes_.size())
    throw Error("tape: invalid variable handle");
  return nodes_[v.id];
}

const Tensor& Tape::value(Var v) const { return node(v).val(); }

bool Tape::needs_grad(Var v) const { return node(v).needs_grad; }

Tensor& Tape::grad_acc(Var v) {
  Node& n = node(v);
  if (!n.has_grad_buf) {
    n.grad = Tensor::zeros(n.val().shape());
    n.has_grad_buf = true;
  }
  return n.grad;
}

const Tensor& Tape::grad(Var v) {
  if (!backward_done_) throw Error("tape: grad() before backward()");
  return grad_acc(v);
}

void Tape::backward(Var loss) {
  if (backward_done_) throw Error("tape: backward() already ran on this tape");
  const Node& ln = node(loss);
  if (ln.val().size() != 1)
    throw Error("tape: backward() needs a scalar loss, got " +
                shape_str(ln.val().shape()));
  grad_acc(loss)[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (n.needs_grad && n.has_grad_buf && n.pullback) n.pullback(*this);
  }
  backward_done_ = true;
}

// ---- op helpers -----------------------------------------------------------

namespace {

bool any_needs_grad(Tape& t, std::initializer_list<Var> vars) {
  for (Var v : vars)
    if (t.needs_grad(v)) return true;
  return false;
}

}  // namespace

// ---- primitives -----------------------------------------------------------

Var matmul(Tape& t, Var a, Var b) {
  Tensor out = linalg::matmul(t.value(a), t.value(b));
  check_finite(out, "matmul");
  const bool ng = any_needs_grad(t, {a, b});
  return t.emplace(std::move(out), ng, [a, b, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    if (tp.needs_grad(a))
      linalg::add_inplace(tp.grad_acc(a), linalg::matmul(go, tp.value(b), false, true));
    if (tp.needs_grad(b))
      linalg::add_inplace(tp.grad_acc(b), linalg::matmul(tp.value(a), go, true, false));
  });
}

Var matmul_nt(Tape& t, Var a, Var b) {
  Tensor out = linalg::matmul(t.value(a), t.value(b), false, true);
  check_finite(out, "matmul_nt");
  const bool ng = any_needs_grad(t, {a, b});
  return t.emplace(std::move(out), ng, [a, b, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    if (tp.needs_grad(a))
      linalg::add_inplace(tp.grad_acc(a), linalg::matmul(go, tp.value(b)));
    if (tp.needs_grad(b))
      linalg::add_inplace(tp.grad_acc(b), linalg::matmul(go, tp.value(a), true, false));
  });
}

Var add(Tape& t, Var a, Var b) {
  const Tensor& va = t.value(a);
  const Tensor& vb = t.value(b);
  if (!va.same_shape(vb))
    throw Error("add: shapes differ, " + shape_str(va.shape()) + " vs " +
                shape_str(vb.shape()));
  Tensor out = va;
  linalg::add_inplace(out, vb);
  check_finite(out, "add");
  const bool ng = any_needs_grad(t, {a, b});
  return t.emplace(std::move(out), ng, [a, b, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    if (tp.needs_grad(a)) linalg::add_inplace(tp.grad_acc(a), go);
    if (tp.needs_grad(b)) linalg::add_inplace(tp.grad_acc(b), go);
  });
}

Var sub(Tape& t, Var a, Var b) { return add(t, a, scale(t, b, -1.0)); }

Var add_bias(Tape& t, Var x, Var bias) {
  Tensor out = t.value(x);
  linalg::add_bias_inplace(out, t.value(bias));
  check_finite(out, "add_bias");
  const bool ng = any_needs_grad(t, {x, bias});
  return t.emplace(std::move(out), ng, [x, bias, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    if (tp.needs_grad(x)) linalg::add_inplace(tp.grad_acc(x), go);
    if (tp.needs_grad(bias)) {
      Tensor& gb = tp.grad_acc(bias);
      const std::size_t r = go.rows(), c = go.cols();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) gb[j] += go.at(i, j);
    }
  });
}

Var scale(Tape& t, Var x, double c) {
  Tensor out = t.value(x);
  linalg::scale_inplace(out, c);
  check_finite(out, "scale");
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, c, o_id = t.node_count()](Tape& tp) {
    Tensor go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    linalg::scale_inplace(go, c);
    linalg::add_inplace(tp.grad_acc(x), go);
  });
}

Var mul_scalar(Tape& t, Var x, Var s) {
  const Tensor& vs = t.value(s);
  if (vs.size() != 1)
    throw Error("mul_scalar: scalar operand has shape " + shape_str(vs.shape()));
  Tensor out = t.value(x);
  linalg::scale_inplace(out, vs[0]);
  check_finite(out, "mul_scalar");
  const bool ng = any_needs_grad(t, {x, s});
  return t.emplace(std::move(out), ng, [x, s, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    if (tp.needs_grad(x)) {
      Tensor gx = go;
      linalg::scale_inplace(gx, tp.value(s)[0]);
      linalg::add_inplace(tp.grad_acc(x), gx);
    }
    if (tp.needs_grad(s)) {
      const Tensor& vx = tp.value(x);
      double acc = 0.0;
      for (std::size_t i = 0; i < vx.size(); ++i) acc += vx[i] * go[i];
      tp.grad_acc(s)[0] += acc;
    }
  });
}

Var relu(Tape& t, Var x) {
  Tensor out = linalg::relu(t.value(x));
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    const Tensor& vx = tp.value(x);
    Tensor& gx = tp.grad_acc(x);
    for (std::size_t i = 0; i < vx.size(); ++i)
      if (vx[i] > 0.0) gx[i] += go[i];
  });
}

Var softmax(Tape& t, Var x) {
  Tensor out = linalg::softmax_rows(t.value(x));
  check_finite(out, "softmax");
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, o_id = t.node_count()](Tape& tp) {
    const Var o{static_cast<std::uint32_t>(o_id)};
    const Tensor& go = tp.grad_acc(o);
    const Tensor& so = tp.value(o);
    Tensor& gx = tp.grad_acc(x);
    const std::size_t width = so.shape().empty() ? 1 : so.shape().back();
    const std::size_t nrows = so.size() / width;
    for (std::size_t i = 0; i < nrows; ++i) {
      const double* s = so.data() + i * width;
      const double* g = go.data() + i * width;
      double dot = 0.0;
      for (std::size_t j = 0; j < width; ++j) dot += s[j] * g[j];
      double* gi = gx.data() + i * width;
      for (std::size_t j = 0; j < width; ++j) gi[j] += s[j] * (g[j] - dot);
    }
  });
}

Var log_softmax(Tape& t, Var x) {
  Tensor out = linalg::log_softmax_rows(t.value(x));
  check_finite(out, "log_softmax");
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, o_id = t.node_count()](Tape& tp) {
    const Var o{static_cast<std::uint32_t>(o_id)};
    const Tensor& go = tp.grad_acc(o);
    const Tensor& lo = tp.value(o);
    Tensor& gx = tp.grad_acc(x);
    const std::size_t width = lo.shape().empty() ? 1 : lo.shape().back();
    const std::size_t nrows = lo.size() / width;
    for (std::size_t i = 0; i < nrows; ++i) {
      const double* l = lo.data() + i * width;
      const double* g = go.data() + i * width;
      double gsum = 0.0;
      for (std::size_t j = 0; j < width; ++j) gsum += g[j];
      double* gi = gx.data() + i * width;
      for (std::size_t j = 0; j < width; ++j)
        gi[j] += g[j] - std::exp(l[j]) * gsum;
    }
  });
}

Var layer_norm(Tape& t, Var x, Var gain, Var bias) {
  Tensor out = linalg::layer_norm_rows(t.value(x), t.value(gain), t.value(bias),
                                       linalg::kLayerNormEps);
  check_finite(out, "layer_norm");
  const bool ng = any_needs_grad(t, {x, gain, bias});
  return t.emplace(std::move(out), ng,
                   [x, gain, bias, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    const Tensor& vx = tp.value(x);
    const Tensor& vg = tp.value(gain);
    const std::size_t width = vx.shape().empty() ? 1 : vx.shape().back();
    const std::size_t nrows = vx.size() / width;
    const double n = static_cast<double>(width);
    const bool need_x = tp.needs_grad(x);
    const bool need_g = tp.needs_grad(gain);
    const bool need_b = tp.needs_grad(bias);
    for (std::size_t i = 0; i < nrows; ++i) {
      const double* xi = vx.data() + i * width;
      const double* gi = go.data() + i * width;
      double mean = 0.0;
      for (std::size_t j = 0; j < width; ++j) mean += xi[j];
      mean /= n;
      double var = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const double d = xi[j] - mean;
        var += d * d;
      }
      var /= n;
      const double inv = 1.0 / std::sqrt(var + linalg::kLayerNormEps);
      // dgain/dbias accumulate per row; dx uses the two row means of
      // (g*go) and (g*go*xhat).
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const double xhat = (xi[j] - mean) * inv;
        const double gg = vg[j] * gi[j];
        m1 += gg;
        m2 += gg * xhat;
      }
      m1 /= n;
      m2 /= n;
      if (need_x) {
        Tensor& gx = tp.grad_acc(x);
        double* gxi = gx.data() + i * width;
        for (std::size_t j = 0; j < width; ++j) {
          const double xhat = (xi[j] - mean) * inv;
          gxi[j] += (vg[j] * gi[j] - m1 - xhat * m2) * inv;
        }
      }
      if (need_g) {
        Tensor& gg = tp.grad_acc(gain);
        for (std::size_t j = 0; j < width; ++j)
          gg[j] += gi[j] * (xi[j] - mean) * inv;
      }
      if (need_b) {
        Tensor& gb = tp.grad_acc(bias);
        for (std::size_t j = 0; j < width; ++j) gb[j] += gi[j];
      }
    }
  });
}

Var embedding_lookup(Tape& t, Var table, const std::vector<int>& ids) {
  const Tensor& tab = t.value(table);
  require_rank2(tab, "embedding_lookup");
  const std::size_t v = tab.rows(), h = tab.cols();
  if (ids.empty()) throw Error("embedding_lookup: empty id list");
  Tensor out = Tensor::zeros({ids.size(), h});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= v)
      throw Error("embedding_lookup: id " + std::to_string(id) +
                  " outside table " + shape_str(tab.shape()));
    std::memcpy(out.data() + i * h, tab.data() + static_cast<std::size_t>(id) * h,
                h * sizeof(double));
  }
  return t.emplace(std::move(out), t.needs_grad(table),
                   [table, ids, h, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    Tensor& gt = tp.grad_acc(table);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      double* row = gt.data() + static_cast<std::size_t>(ids[i]) * h;
      const double* src = go.data() + i * h;
      for (std::size_t j = 0; j < h; ++j) row[j] += src[j];
    }
  });
}

Var concat(Tape& t, std::span<const Var> parts, int axis) {
  if (parts.empty()) throw Error("concat: no inputs");
  const Tensor& first = t.value(parts[0]);
  const std::size_t rank = first.shape().size();
  if (rank == 1) {
    if (axis != 0) throw Error("concat: axis 1 on rank-1 input");
  } else if (rank != 2 || (axis != 0 && axis != 1)) {
    throw Error("concat: rank " + std::to_string(rank) + ", axis " +
                std::to_string(axis));
  }
  std::size_t total = 0;
  for (Var p : parts) {
    const Tensor& v = t.value(p);
    if (v.shape().size() != rank)
      throw Error("concat: mixed ranks");
    if (rank == 2) {
      const std::size_t other = axis == 0 ? 1 : 0;
      if (v.shape()[other] != first.shape()[other])
        throw Error("concat: off-axis extents differ, " +
                    shape_str(v.shape()) + " vs " + shape_str(first.shape()));
    }
    total += v.shape()[static_cast<std::size_t>(rank == 1 ? 0 : axis)];
  }
  Shape out_shape = first.shape();
  out_shape[static_cast<std::size_t>(rank == 1 ? 0 : axis)] = total;
  Tensor out = Tensor::zeros(out_shape);
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (Var p : parts) {
    offsets.push_back(off);
    const Tensor& v = t.value(p);
    if (rank == 1 || axis == 0) {
      std::memcpy(out.data() + off, v.data(), v.size() * sizeof(double));
      off += v.size();
    } else {
      const std::size_t r = v.rows(), c = v.cols(), oc = out.cols();
      for (std::size_t i = 0; i < r; ++i)
        std::memcpy(out.data() + i * oc + off, v.data() + i * c,
                    c * sizeof(double));
      off += c;
    }
  }
  bool ng = false;
  for (Var p : parts) ng = ng || t.needs_grad(p);
  std::vector<Var> part_vec(parts.begin(), parts.end());
  return t.emplace(std::move(out), ng,
                   [part_vec, offsets, axis, rank, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    for (std::size_t k = 0; k < part_vec.size(); ++k) {
      if (!tp.needs_grad(part_vec[k])) continue;
      Tensor& g = tp.grad_acc(part_vec[k]);
      const std::size_t off = offsets[k];
      if (rank == 1 || axis == 0) {
        const double* src = go.data() + off;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += src[i];
      } else {
        const std::size_t r = g.rows(), c = g.cols(), oc = go.cols();
        for (std::size_t i = 0; i < r; ++i) {
          const double* src = go.data() + i * oc + off;
          double* dst = g.data() + i * c;
          for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
        }
      }
    }
  });
}

Var slice(Tape& t, Var x, int axis, std::size_t begin, std::size_t end) {
  const Tensor& vx = t.value(x);
  const std::size_t rank = vx.shape().size();
  if (rank == 0 || rank > 2) throw Error("slice: rank-" + std::to_string(rank));
  const std::size_t ax = rank == 1 ? 0 : static_cast<std::size_t>(axis);
  if (ax >= rank || begin >= end || end > vx.shape()[ax])
    throw Error("slice: [" + std::to_string(begin) + "," + std::to_string(end) +
                ") on axis " + std::to_string(axis) + " of " +
                shape_str(vx.shape()));
  Tensor out;
  if (rank == 1) {
    out = Tensor::zeros({end - begin});
    std::memcpy(out.data(), vx.data() + begin, (end - begin) * sizeof(double));
  } else if (ax == 0) {
    const std::size_t c = vx.cols();
    out = Tensor::zeros({end - begin, c});
    std::memcpy(out.data(), vx.data() + begin * c,
                (end - begin) * c * sizeof(double));
  } else {
    const std::size_t r = vx.rows(), c = vx.cols();
    out = Tensor::zeros({r, end - begin});
    for (std::size_t i = 0; i < r; ++i)
      std::memcpy(out.data() + i * (end - begin), vx.data() + i * c + begin,
                  (end - begin) * sizeof(double));
  }
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, ax, begin, end, rank, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    Tensor& gx = tp.grad_acc(x);
    if (rank == 1 || ax == 0) {
      const std::size_t c = rank == 1 ? 1 : gx.cols();
      double* dst = gx.data() + begin * c;
      for (std::size_t i = 0; i < go.size(); ++i) dst[i] += go[i];
    } else {
      const std::size_t r = gx.rows(), c = gx.cols(), w = end - begin;
      for (std::size_t i = 0; i < r; ++i) {
        const double* src = go.data() + i * w;
        double* dst = gx.data() + i * c + begin;
        for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
      }
    }
  });
}

Var mask_fill(Tape& t, Var x, const std::vector<std::uint8_t>& mask, double fill) {
  const Tensor& vx = t.value(x);
  if (mask.size() != vx.size())
    throw Error("mask_fill: mask size " + std::to_string(mask.size()) +
                " against tensor " + shape_str(vx.shape()));
  Tensor out = vx;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i]) out[i] = fill;
  check_finite(out, "mask_fill");
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, mask, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    Tensor& gx = tp.grad_acc(x);
    for (std::size_t i = 0; i < gx.size(); ++i)
      if (!mask[i]) gx[i] += go[i];
  });
}

Var cross_entropy(Tape& t, Var logits, const std::vector<int>& targets) {
  const Tensor& vl = t.value(logits);
  require_rank2(vl, "cross_entropy");
  const std::size_t rows = vl.rows(), v = vl.cols();
  if (targets.size() != rows)
    throw Error("cross_entropy: " + std::to_string(targets.size()) +
                " targets for logits " + shape_str(vl.shape()));
  for (int id : targets)
    if (id < 0 || static_cast<std::size_t>(id) >= v)
      throw Error("cross_entropy: target id " + std::to_string(id) +
                  " outside vocabulary of " + std::to_string(v));
  Tensor ls = linalg::log_softmax_rows(vl);
  Tensor out = Tensor::zeros({rows});
  for (std::size_t i = 0; i < rows; ++i)
    out[i] = -ls.data()[i * v + static_cast<std::size_t>(targets[i])];
  check_finite(out, "cross_entropy");
  return t.emplace(std::move(out), t.needs_grad(logits),
                   [logits, targets, v, o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    const Tensor& vl = tp.value(logits);
    Tensor sm = linalg::softmax_rows(vl);
    Tensor& gl = tp.grad_acc(logits);
    const std::size_t rows = vl.rows();
    for (std::size_t i = 0; i < rows; ++i) {
      const double gi = go[i];
      double* dst = gl.data() + i * v;
      const double* s = sm.data() + i * v;
      for (std::size_t j = 0; j < v; ++j) dst[j] += gi * s[j];
      dst[static_cast<std::size_t>(targets[i])] -= gi;
    }
  });
}

Var sum(Tape& t, Var x) {
  const Tensor& vx = t.value(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < vx.size(); ++i) acc += vx[i];
  Tensor out = Tensor::scalar(acc);
  check_finite(out, "sum");
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, o_id = t.node_count()](Tape& tp) {
    const double g = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)})[0];
    Tensor& gx = tp.grad_acc(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var mean(Tape& t, Var x) {
  const Tensor& vx = t.value(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < vx.size(); ++i) acc += vx[i];
  const double n = static_cast<double>(vx.size());
  Tensor out = Tensor::scalar(acc / n);
  check_finite(out, "mean");
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, n, o_id = t.node_count()](Tape& tp) {
    const double g = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)})[0] / n;
    Tensor& gx = tp.grad_acc(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var dropout(Tape& t, Var x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  if (rate >= 1.0) throw Error("dropout: rate must be below 1");
  const Tensor& vx = t.value(x);
  std::vector<std::uint8_t> keep(vx.size());
  const double inv_keep = 1.0 / (1.0 - rate);
  Tensor out = vx;
  for (std::size_t i = 0; i < out.size(); ++i) {
    keep[i] = rng.uniform() >= rate;
    out[i] = keep[i] ? out[i] * inv_keep : 0.0;
  }
  return t.emplace(std::move(out), t.needs_grad(x),
                   [x, keep = std::move(keep), inv_keep,
                    o_id = t.node_count()](Tape& tp) {
    const Tensor& go = tp.grad_acc(Var{static_cast<std::uint32_t>(o_id)});
    Tensor& gx = tp.grad_acc(x);
    for (std::size_t i = 0; i < gx.size(); ++i)
      if (keep[i]) gx[i] += go[i] * inv_keep;
  });
}

// ---- ParamBinder ----------------------------------------------------------

Var ParamBinder::use(Param& p) {
  auto [it, inserted] = bound_.try_emplace(&p, Var{});
  if (inserted) it->second = tape_->leaf_ref(p.value, trainable_);
  return it->second;
}

void ParamBinder::collect(double scale_factor) {
  if (!trainable_) throw Error("ParamBinder: collect() on an eval binder");
  if (!tape_->backward_done())
    throw Error("ParamBinder: collect() before backward()");
  for (auto& [p, v] : bound_) {
    const Tensor& g = tape_->grad(v);
    for (std::size_t i = 0; i < g.size(); ++i)
      p->grad[i] += scale_factor * g[i];
  }
}

// ---- grad_check -----------------------------------------------------------

GradCheckReport grad_check(
    ParamSet& params,
    const std::function<Var(Tape&, ParamBinder&)>& program, double epsilon) {
  GradCheckReport report;
  report.epsilon = epsilon;

  params.zero_grads();
  {
    Tape tape;
    ParamBinder binder(tape);
    Var loss = program(tape, binder);
    tape.backward(loss);
    binder.collect();
  }

  auto eval = [&]() {
    Tape tape;
    ParamBinder binder(tape);
    return tape.value(program(tape, binder)).item();
  };

  for (Param* p : params.ordered()) {
    GradCheckEntry entry;
    entry.param = p->name;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + epsilon;
      const double fp = eval();
      p->value[i] = saved - epsilon;
      const double fm = eval();
      p->value[i] = saved;
      const double numeric = (fp - fm) / (2.0 * epsilon);
      const double analytic = p->grad[i];
      const double diff = std::abs(analytic - numeric);
      double rel = diff / std::max(std::abs(analytic) + std::abs(numeric), 1e-8);
      if (diff < 1e-9) rel = 0.0;  // both gradients vanish
      if (rel > entry.max_rel_err) {
        entry.max_rel_err = rel;
        entry.analytic = analytic;
        entry.numeric = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace latentplot
