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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "latentplot/tensor.hpp"

namespace latentplot {

/// A named trainable tensor plus its gradient accumulation buffer.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

enum class Init {
  kZeros,
  kOnes,
  kXavier,       // uniform(+-sqrt(6 / (fan_in + fan_out))) for matrices
  kSmallNormal,  // N(0, 0.02^2), used for embeddings
};

/// Owns the parameters of one model. Initialization is derived from
/// (seed, parameter name), so values do not depend on creation order.
/// Addresses are stable: layer structs keep Param pointers.
class ParamSet {
 public:
  explicit ParamSet(std::uint64_t seed) : seed_(seed) {}

  ParamSet(const ParamSet&) = delete;
  ParamSet& operator=(const ParamSet&) = delete;

  Param& create(const std::string& name, Shape shape, Init init);
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  /// All parameters in name order (deterministic for the optimizer).
  std::vector<Param*> ordered();
  std::vector<const Param*> ordered() const;

  std::size_t count() const { return params_.size(); }
  std::size_t total_size() const;
  std::uint64_t seed() const { return seed_; }

  void zero_grads();

  /// Copies values (by name) from another set; names must match exactly.
  void copy_values_from(const ParamSet& other);

 private:
  std::uint64_t seed_;
  std::map<std::string, Param> params_;
};

// Checkpoint file format: magic "LPCK", u32 version, u64 parameter
// count, then per parameter (u32 name length, name bytes, u32 rank,
// u64 extents..., f64 values...) in name order, all little-endian.
// Round-trips bit-exactly.

void save_checkpoint(const ParamSet& params, const std::filesystem::path& path);

/// Loads values into an existing set; the name/shape inventory must
/// match the file exactly.
void load_checkpoint(ParamSet& params, const std::filesystem::path& path);

}  // namespace latentplot
