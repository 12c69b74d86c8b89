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

#include "latentplot/config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "latentplot/common.hpp"

namespace latentplot {

void TransformerConfig::validate() const {
  if (hidden == 0 || ffn == 0 || heads == 0 || dec_layers == 0 || max_pos == 0)
    throw Error("config: zero extent in model dimensions");
  if (enc_layers_planning == 0 || enc_layers_generation == 0 ||
      enc_layers_summarization == 0 || enc_layers_context == 0)
    throw Error("config: encoder layer counts must be positive");
  if (hidden % heads != 0)
    throw Error(fmt::format("config: hidden {} not divisible by heads {}",
                            hidden, heads));
  if (dropout < 0.0 || dropout >= 1.0)
    throw Error("config: dropout outside [0, 1)");
}

void RunConfig::validate() const {
  model.validate();
  if (vocab_cap < 1) throw Error("config: vocab_cap must be at least 1");
  if (m_samples < 1 || n_samples < 1)
    throw Error("config: m and n must be at least 1");
  if (batch_size < 1) throw Error("config: batch_size must be at least 1");
  if (beam < 1) throw Error("config: beam must be at least 1");
  if (max_outline_len < 1 || max_story_len < 1)
    throw Error("config: decode lengths must be at least 1");
  if (!(learning_rate > 0.0)) throw Error("config: learning_rate must be > 0");
  if (kl_weight < 0.0) throw Error("config: kl_weight must be >= 0");
  if (baseline_decay < 0.0 || baseline_decay >= 1.0)
    throw Error("config: baseline_decay outside [0, 1)");
}

std::string to_string(ObjectiveKind v) {
  return v == ObjectiveKind::kLatent ? "latent" : "vi";
}

std::string to_string(EstimatorMode v) {
  return v == EstimatorMode::kLiteral ? "literal" : "score-function";
}

std::string to_string(Ablation v) {
  switch (v) {
    case Ablation::kNone: return "none";
    case Ablation::kNoPm: return "no-pm";
    case Ablation::kNoSm: return "no-sm";
    case Ablation::kNoPt: return "no-pt";
  }
  return "none";
}

RunConfig paper_config() {
  RunConfig cfg;  // defaults are the paper settings
  return cfg;
}

RunConfig desk_config() {
  RunConfig cfg;
  cfg.model.hidden = 64;
  cfg.model.ffn = 256;
  cfg.model.heads = 2;
  cfg.model.enc_layers_planning = 2;
  cfg.model.enc_layers_generation = 2;
  cfg.model.enc_layers_summarization = 2;
  cfg.model.enc_layers_context = 1;
  cfg.model.dec_layers = 2;
  cfg.model.dropout = 0.0;
  cfg.model.max_pos = 128;
  cfg.vocab_cap = 2000;
  cfg.warmup = 200;
  cfg.steps = 2000;
  cfg.pretrain_epochs = 10;
  cfg.log_interval = 100;
  cfg.max_outline_len = 6;
  cfg.max_story_len = 40;
  return cfg;
}

RunConfig config_from_preset(const std::string& name) {
  if (name == "paper") return paper_config();
  if (name == "desk") return desk_config();
  throw Error("config: unknown preset '" + name + "' (want desk or paper)");
}

namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size())
    throw Error("config: bad integer for " + key + ": '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size())
    throw Error("config: bad integer for " + key + ": '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw Error("config: bad number for " + key + ": '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error("config: bad flag for " + key + ": '" + value + "'");
}

}  // namespace

void apply_config_override(RunConfig& cfg, const std::string& key,
                           const std::string& value) {
  if (key == "hidden") cfg.model.hidden = parse_size(key, value);
  else if (key == "ffn") cfg.model.ffn = parse_size(key, value);
  else if (key == "heads") cfg.model.heads = parse_size(key, value);
  else if (key == "enc_layers_planning") cfg.model.enc_layers_planning = parse_size(key, value);
  else if (key == "enc_layers_generation") cfg.model.enc_layers_generation = parse_size(key, value);
  else if (key == "enc_layers_summarization") cfg.model.enc_layers_summarization = parse_size(key, value);
  else if (key == "enc_layers_context") cfg.model.enc_layers_context = parse_size(key, value);
  else if (key == "dec_layers") cfg.model.dec_layers = parse_size(key, value);
  else if (key == "dropout") cfg.model.dropout = parse_double(key, value);
  else if (key == "max_pos") cfg.model.max_pos = parse_size(key, value);
  else if (key == "vocab_cap") cfg.vocab_cap = parse_size(key, value);
  else if (key == "learning_rate") cfg.learning_rate = parse_double(key, value);
  else if (key == "warmup") cfg.warmup = parse_size(key, value);
  else if (key == "batch_size") cfg.batch_size = parse_size(key, value);
  else if (key == "steps") cfg.steps = parse_size(key, value);
  else if (key == "pretrain_epochs") cfg.pretrain_epochs = parse_size(key, value);
  else if (key == "m") cfg.m_samples = parse_size(key, value);
  else if (key == "n") cfg.n_samples = parse_size(key, value);
  else if (key == "kl_weight") cfg.kl_weight = parse_double(key, value);
  else if (key == "estimator") {
    if (value == "literal") cfg.estimator = EstimatorMode::kLiteral;
    else if (value == "score-function") cfg.estimator = EstimatorMode::kScoreFunction;
    else throw Error("config: estimator must be literal|score-function");
  } else if (key == "freeze_summarizer") cfg.freeze_summarizer = parse_bool(key, value);
  else if (key == "objective") {
    if (value == "latent") cfg.objective = ObjectiveKind::kLatent;
    else if (value == "vi") cfg.objective = ObjectiveKind::kVi;
    else throw Error("config: objective must be latent|vi");
  } else if (key == "ablation") {
    if (value == "none") cfg.ablation = Ablation::kNone;
    else if (value == "no-pm") cfg.ablation = Ablation::kNoPm;
    else if (value == "no-sm") cfg.ablation = Ablation::kNoSm;
    else if (value == "no-pt") cfg.ablation = Ablation::kNoPt;
    else throw Error("config: ablation must be none|no-pm|no-sm|no-pt");
  } else if (key == "baseline_decay") cfg.baseline_decay = parse_double(key, value);
  else if (key == "log_interval") cfg.log_interval = parse_size(key, value);
  else if (key == "beam") cfg.beam = parse_size(key, value);
  else if (key == "max_outline_len") cfg.max_outline_len = parse_size(key, value);
  else if (key == "max_story_len") cfg.max_story_len = parse_size(key, value);
  else if (key == "length_penalty") cfg.length_penalty = parse_double(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else throw Error("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("config: cannot open " + path.string());
  RunConfig cfg = paper_config();
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(fmt::format("config: line {}: expected key=value", line_no));
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "preset") {
      if (!first_content_line)
        throw Error("config: preset= must be the first setting");
      cfg = config_from_preset(value);
    } else {
      apply_config_override(cfg, key, value);
    }
    first_content_line = false;
  }
  cfg.validate();
  return cfg;
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("config: cannot open " + path.string() + " for write");
  os << fmt::format(
      "hidden={}\nffn={}\nheads={}\n"
      "enc_layers_planning={}\nenc_layers_generation={}\n"
      "enc_layers_summarization={}\nenc_layers_context={}\ndec_layers={}\n"
      "dropout={}\nmax_pos={}\n",
      cfg.model.hidden, cfg.model.ffn, cfg.model.heads,
      cfg.model.enc_layers_planning, cfg.model.enc_layers_generation,
      cfg.model.enc_layers_summarization, cfg.model.enc_layers_context,
      cfg.model.dec_layers, cfg.model.dropout, cfg.model.max_pos);
  os << fmt::format(
      "vocab_cap={}\nlearning_rate={}\nwarmup={}\nbatch_size={}\nsteps={}\n"
      "pretrain_epochs={}\nm={}\nn={}\nkl_weight={}\nestimator={}\n"
      "freeze_summarizer={}\nobjective={}\nablation={}\nbaseline_decay={}\n"
      "log_interval={}\nbeam={}\nmax_outline_len={}\nmax_story_len={}\n"
      "length_penalty={}\nseed={}\n",
      cfg.vocab_cap, cfg.learning_rate, cfg.warmup, cfg.batch_size, cfg.steps,
      cfg.pretrain_epochs, cfg.m_samples, cfg.n_samples, cfg.kl_weight,
      to_string(cfg.estimator), cfg.freeze_summarizer,
      to_string(cfg.objective), to_string(cfg.ablation), cfg.baseline_decay,
      cfg.log_interval, cfg.beam, cfg.max_outline_len, cfg.max_story_len,
      cfg.length_penalty, cfg.seed);
  if (!os) throw Error("config: write failed for " + path.string());
}

}  // namespace latentplot
