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

#include "latentplot/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "latentplot/common.hpp"
#include "latentplot/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace latentplot {

Param& ParamSet::create(const std::string& name, Shape shape, Init init) {
  if (params_.contains(name)) throw Error("param exists: " + name);
  Tensor value = Tensor::zeros(shape);
  Rng rng(derive_seed(seed_, name));
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kOnes:
      for (std::size_t i = 0; i < value.size(); ++i) value[i] = 1.0;
      break;
    case Init::kXavier: {
      const std::size_t fan_in = shape.size() == 2 ? shape[0] : value.size();
      const std::size_t fan_out = shape.size() == 2 ? shape[1] : value.size();
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (std::size_t i = 0; i < value.size(); ++i)
        value[i] = rng.uniform(-bound, bound);
      break;
    }
    case Init::kSmallNormal:
      for (std::size_t i = 0; i < value.size(); ++i)
        value[i] = 0.02 * rng.normal();
      break;
  }
  Param p{name, std::move(value), Tensor::zeros(shape)};
  auto [it, ok] = params_.emplace(name, std::move(p));
  (void)ok;
  return it->second;
}

Param& ParamSet::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("no such param: " + name);
  return it->second;
}

const Param& ParamSet::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("no such param: " + name);
  return it->second;
}

bool ParamSet::contains(const std::string& name) const {
  return params_.contains(name);
}

std::vector<Param*> ParamSet::ordered() {
  std::vector<Param*> out;
  out.reserve(params_.size());
  for (auto& [_, p] : params_) out.push_back(&p);
  return out;
}

std::vector<const Param*> ParamSet::ordered() const {
  std::vector<const Param*> out;
  out.reserve(params_.size());
  for (const auto& [_, p] : params_) out.push_back(&p);
  return out;
}

std::size_t ParamSet::total_size() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.size();
  return n;
}

void ParamSet::zero_grads() {
  for (auto& [_, p] : params_)
    std::memset(p.grad.data(), 0, p.grad.size() * sizeof(double));
}

void ParamSet::copy_values_from(const ParamSet& other) {
  for (auto& [name, p] : params_) {
    const Param& src = other.at(name);
    if (!src.value.same_shape(p.value))
      throw Error("copy_values_from: shape mismatch for " + name);
    p.value = src.value;
  }
}

namespace {

constexpr char kMagic[4] = {'L', 'P', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const ParamSet& params, const std::filesystem::path& path) {
  // Write-then-rename so an interrupted save never leaves a partial file.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("checkpoint: cannot open " + tmp.string());
    os.write(kMagic, 4);
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint64_t>(params.count()));
    for (const Param* p : params.ordered()) {
      write_pod(os, static_cast<std::uint32_t>(p->name.size()));
      os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
      write_pod(os, static_cast<std::uint32_t>(p->value.shape().size()));
      for (std::size_t e : p->value.shape())
        write_pod(os, static_cast<std::uint64_t>(e));
      os.write(reinterpret_cast<const char*>(p->value.data()),
               static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    }
    if (!os) throw Error("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void load_checkpoint(ParamSet& params, const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("checkpoint: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("checkpoint: bad magic in " + path.string());
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw Error("checkpoint: unsupported version " + std::to_string(version));
  const auto n = read_pod<std::uint64_t>(is);
  if (n != params.count())
    throw Error("checkpoint: " + std::to_string(n) + " params in file, " +
                std::to_string(params.count()) + " expected");
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto name_len = read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const auto rank = read_pod<std::uint32_t>(is);
    Shape shape(rank);
    for (auto& e : shape) e = read_pod<std::uint64_t>(is);
    Param& p = params.at(name);
    if (p.value.shape() != shape)
      throw Error("checkpoint: shape mismatch for " + name + ": file " +
                  shape_str(shape) + ", model " + shape_str(p.value.shape()));
    is.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!is) throw Error("checkpoint: truncated values for " + name);
  }
}

}  // namespace latentplot
