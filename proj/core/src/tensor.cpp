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

#include "latentplot/tensor.hpp"

#include <cmath>

#include "latentplot/common.hpp"

namespace latentplot {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

namespace {
std::size_t last_extent(const Shape& shape) {
  return shape.empty() ? 1 : shape.back();
}
}  // namespace

Tensor Tensor::zeros(Shape shape) {
  for (std::size_t e : shape)
    if (e == 0) throw Error("tensor: zero extent in shape " + shape_str(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.cols_ = last_extent(t.shape_);
  t.data_.assign(shape_size(t.shape_), 0.0);
  return t;
}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t = zeros(std::move(shape));
  for (double& v : t.data_) v = value;
  return t;
}

Tensor Tensor::scalar(double value) {
  Tensor t;
  t.cols_ = 1;
  t.data_.assign(1, value);
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values) {
  if (values.size() != shape_size(shape))
    throw Error("tensor: " + std::to_string(values.size()) +
                " values for shape " + shape_str(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.cols_ = last_extent(t.shape_);
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::row(std::initializer_list<double> values) {
  return from({values.size()}, std::vector<double>(values));
}

std::size_t Tensor::rows() const {
  if (shape_.size() != 2) throw Error("tensor: rows() on rank-" +
                                      std::to_string(shape_.size()));
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2) throw Error("tensor: cols() on rank-" +
                                      std::to_string(shape_.size()));
  return shape_[1];
}

double Tensor::item() const {
  if (data_.size() != 1)
    throw Error("tensor: item() on non-scalar " + shape_str(shape_));
  return data_[0];
}

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace latentplot
