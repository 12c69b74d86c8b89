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

#include "latentplot/tensor.hpp"

namespace latentplot::linalg {

// Forward-only kernels shared by the tape ops and the incremental
// decoder, so both paths compute with identical arithmetic.

/// a @ b, optionally transposing either operand.
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false,
              bool trans_b = false);

/// dst += src (same shape).
void add_inplace(Tensor& dst, const Tensor& src);

/// x(r,c) += bias(c) on every row.
void add_bias_inplace(Tensor& x, const Tensor& bias);

void scale_inplace(Tensor& x, double c);

/// Row-wise stable softmax over the last axis (rank 1 = one row).
Tensor softmax_rows(const Tensor& x);

/// Row-wise stable log-softmax over the last axis.
Tensor log_softmax_rows(const Tensor& x);

/// Row-wise layer normalization: gain * (x - mean) / sqrt(var + eps) + bias.
Tensor layer_norm_rows(const Tensor& x, const Tensor& gain, const Tensor& bias,
                       double eps);

Tensor relu(const Tensor& x);

constexpr double kLayerNormEps = 1e-5;

/// Large finite magnitude used to disable attention/vocabulary entries;
/// keeps every forward value finite where -inf would not.
constexpr double kMaskValue = -1e30;

}  // namespace latentplot::linalg
