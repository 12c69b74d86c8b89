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
#include <string>

namespace latentplot {

/// Shared transformer dimensions. The per-role encoder depths follow the
/// three-model layout: shallow encoders for planning/generation, a deep
/// one for summarization, plus the small context encoder of the
/// multi-source wiring.
struct TransformerConfig {
  std::size_t hidden = 256;
  std::size_t ffn = 1024;
  std::size_t heads = 4;
  std::size_t enc_layers_planning = 2;
  std::size_t enc_layers_generation = 2;
  std::size_t enc_layers_summarization = 6;
  std::size_t enc_layers_context = 2;
  std::size_t dec_layers = 6;
  double dropout = 0.1;
  std::size_t max_pos = 512;

  void validate() const;  // hidden divisible by heads, extents positive
};

enum class ObjectiveKind { kLatent, kVi };
enum class EstimatorMode { kLiteral, kScoreFunction };
enum class Ablation { kNone, kNoPm, kNoSm, kNoPt };

std::string to_string(ObjectiveKind v);
std::string to_string(EstimatorMode v);
std::string to_string(Ablation v);

/// Everything a run needs to be reproduced: model dimensions, training
/// hyperparameters, decoding settings, and the seed. Serialized as a
/// line-oriented key=value file next to each run's outputs.
struct RunConfig {
  TransformerConfig model;

  std::size_t vocab_cap = 50000;

  // training
  double learning_rate = 2e-3;  // peak rate of the inverse-sqrt schedule
  std::size_t warmup = 4000;
  std::size_t batch_size = 8;
  std::size_t steps = 20000;
  std::size_t pretrain_epochs = 10;
  std::size_t m_samples = 1;
  std::size_t n_samples = 1;
  double kl_weight = 1.0;
  EstimatorMode estimator = EstimatorMode::kLiteral;
  bool freeze_summarizer = false;
  ObjectiveKind objective = ObjectiveKind::kLatent;
  Ablation ablation = Ablation::kNone;
  double baseline_decay = 0.95;
  std::size_t log_interval = 100;

  // decoding
  std::size_t beam = 4;
  std::size_t max_outline_len = 20;  // K_max of the forced-EOS outline space
  std::size_t max_story_len = 120;
  double length_penalty = 0.0;  // 0 = raw cumulative log-probability

  std::uint64_t seed = 1;

  void validate() const;
};

/// Paper-fidelity dimensions (hidden 256, ffn 1024, 2/2/6 encoders,
/// 6-layer decoders, 50K vocabulary).
RunConfig paper_config();

/// Small configuration every test runs on: hidden 64, ffn 256, 2 heads,
/// 2-layer stacks, no dropout.
RunConfig desk_config();

RunConfig config_from_preset(const std::string& name);

/// Reads a key=value file. A `preset=` line selects the base config;
/// remaining lines override single keys. Unknown keys are errors.
RunConfig load_config(const std::filesystem::path& path);

/// Writes every resolved key, suitable for load_config round-trips.
void save_config(const RunConfig& config, const std::filesystem::path& path);

/// Applies one key=value override in place.
void apply_config_override(RunConfig& config, const std::string& key,
                           const std::string& value);

}  // namespace latentplot
