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

#include "latentplot/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "latentplot/common.hpp"

namespace latentplot::linalg {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using ConstMap = Eigen::Map<const EMat>;

ConstMap as_matrix(const Tensor& t) {
  if (t.shape().size() == 2)
    return ConstMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                    static_cast<Eigen::Index>(t.cols()));
  if (t.shape().size() == 1)
    return ConstMap(t.data(), 1, static_cast<Eigen::Index>(t.size()));
  throw Error("linalg: rank-" + std::to_string(t.shape().size()) +
              " tensor where a matrix is required");
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  ConstMap ma = as_matrix(a);
  ConstMap mb = as_matrix(b);
  const Eigen::Index am = trans_a ? ma.cols() : ma.rows();
  const Eigen::Index ak = trans_a ? ma.rows() : ma.cols();
  const Eigen::Index bk = trans_b ? mb.cols() : mb.rows();
  const Eigen::Index bn = trans_b ? mb.rows() : mb.cols();
  if (ak != bk)
    throw Error("matmul: inner extents differ, " + shape_str(a.shape()) +
                (trans_a ? "^T" : "") + " @ " + shape_str(b.shape()) +
                (trans_b ? "^T" : ""));
  Tensor out = Tensor::zeros({static_cast<std::size_t>(am),
                              static_cast<std::size_t>(bn)});
  Map mo(out.data(), am, bn);
  if (!trans_a && !trans_b)
    mo.noalias() = ma * mb;
  else if (!trans_a && trans_b)
    mo.noalias() = ma * mb.transpose();
  else if (trans_a && !trans_b)
    mo.noalias() = ma.transpose() * mb;
  else
    mo.noalias() = ma.transpose() * mb.transpose();
  return out;
}

void add_inplace(Tensor& dst, const Tensor& src) {
  if (!dst.same_shape(src))
    throw Error("add: shapes differ, " + shape_str(dst.shape()) + " vs " +
                shape_str(src.shape()));
  double* d = dst.data();
  const double* s = src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

void add_bias_inplace(Tensor& x, const Tensor& bias) {
  if (x.shape().size() != 2 || bias.shape().size() != 1 ||
      bias.size() != x.cols())
    throw Error("add_bias: " + shape_str(x.shape()) + " + " +
                shape_str(bias.shape()));
  const std::size_t r = x.rows(), c = x.cols();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) x.at(i, j) += bias[j];
}

void scale_inplace(Tensor& x, double c) {
  double* d = x.data();
  for (std::size_t i = 0; i < x.size(); ++i) d[i] *= c;
}

namespace {

// Applies fn(row pointer, width) over the last axis.
template <typename Fn>
void for_each_row(const Tensor& x, Tensor& out, Fn fn) {
  const std::size_t width = x.shape().empty() ? 1 : x.shape().back();
  const std::size_t nrows = x.size() / width;
  for (std::size_t i = 0; i < nrows; ++i)
    fn(x.data() + i * width, out.data() + i * width, width);
}

}  // namespace

Tensor softmax_rows(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape());
  for_each_row(x, out, [](const double* in, double* o, std::size_t n) {
    double mx = in[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, in[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (std::size_t j = 0; j < n; ++j) o[j] /= total;
  });
  return out;
}

Tensor log_softmax_rows(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape());
  for_each_row(x, out, [](const double* in, double* o, std::size_t n) {
    double mx = in[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, in[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::exp(in[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < n; ++j) o[j] = in[j] - lse;
  });
  return out;
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps) {
  const std::size_t width = x.shape().empty() ? 1 : x.shape().back();
  if (gain.size() != width || bias.size() != width)
    throw Error("layer_norm: gain/bias " + shape_str(gain.shape()) + "/" +
                shape_str(bias.shape()) + " against " + shape_str(x.shape()));
  Tensor out = Tensor::zeros(x.shape());
  const double* g = gain.data();
  const double* b = bias.data();
  for_each_row(x, out, [&](const double* in, double* o, std::size_t n) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += in[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = in[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j)
      o[j] = g[j] * (in[j] - mean) * inv + b[j];
  });
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  double* d = out.data();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (d[i] < 0.0) d[i] = 0.0;
  return out;
}

}  // namespace latentplot::linalg
