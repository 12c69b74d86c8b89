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

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "latentplot/config.hpp"
#include "latentplot/textproc.hpp"
#include "latentplot/transformer.hpp"

namespace latentplot {

// The three conditional sequence models share one implementation; the
// kind fixes the source wiring and the expected roles:
//
//   planning       title -> outline         (used in training + inference)
//   generation     title + outline -> story (multi-source)
//   summarization  story + title -> outline (multi-source, training only)
//   direct         title -> story           (single-source reduction)
//
// Outline distributions live on the forced-EOS space: sampling stops at
// max_len tokens where EOS has probability one, which makes the space
// finite and exactly enumerable.

enum class ModelKind { kPlanning, kGeneration, kSummarization, kDirect };

std::string to_string(ModelKind kind);

struct CondInput {
  TokenSeq main;
  std::optional<TokenSeq> context;  // absent or empty = no context
};

struct OutlineSample {
  std::vector<int> ids;  // content tokens only, BOS/EOS implicit
  double logprob = 0.0;
};

class Model {
 public:
  Model(ModelKind kind, const TransformerConfig& config, std::size_t vocab_size,
        std::uint64_t seed);

  static std::unique_ptr<Model> planning(const TransformerConfig& c,
                                         std::size_t vocab, std::uint64_t seed);
  static std::unique_ptr<Model> generation(const TransformerConfig& c,
                                           std::size_t vocab, std::uint64_t seed);
  static std::unique_ptr<Model> summarization(const TransformerConfig& c,
                                              std::size_t vocab,
                                              std::uint64_t seed);
  static std::unique_ptr<Model> direct(const TransformerConfig& c,
                                       std::size_t vocab, std::uint64_t seed);

  ModelKind kind() const { return kind_; }
  SeqTransformer& net() { return net_; }
  const SeqTransformer& net() const { return net_; }
  ParamSet& params() { return net_.params(); }
  const ParamSet& params() const { return net_.params(); }

  Role main_role() const;
  std::optional<Role> context_role() const;
  Role target_role() const;

  /// Ids never predicted or sampled; defaults to {PAD, BOS, SEP}.
  /// Tiny verification models restrict further so that enumeration over
  /// a small candidate set covers the whole distribution.
  const std::vector<int>& banned_ids() const { return banned_; }
  void set_banned_ids(std::vector<int> ids);

  int bos_id() const { return Vocabulary::kBos; }
  int eos_id() const { return Vocabulary::kEos; }
  std::size_t vocab_size() const { return net_.dims().vocab; }

  /// Errors unless main/context/target roles fit this model.
  void check_input(const CondInput& input, Role target) const;

  /// Σ_t log P(target_t | inputs, target_<t) on a tape. With
  /// forced_eos_max the target lives in the forced-EOS space: EOS is
  /// scored unless the target already has forced_eos_max tokens.
  Var logprob_on_tape(Tape& t, ParamBinder& b, const CondInput& input,
                      const TokenSeq& target,
                      std::optional<std::size_t> forced_eos_max = std::nullopt,
                      Rng* dropout_rng = nullptr) const;

  /// Gradient-free scoring via a throwaway tape.
  double sequence_logprob(const CondInput& input, const TokenSeq& target,
                          std::optional<std::size_t> forced_eos_max =
                              std::nullopt) const;

  // ---- incremental decoding ------------------------------------------

  struct Session {
    SeqTransformer::DecodeState state;
    Tensor next_logits;  // raw logits after the last fed token
  };

  /// Encodes the inputs and feeds BOS.
  Session begin(const CondInput& input) const;
  void advance(Session& session, int token) const;
  /// Masked, renormalized next-token log-probabilities (vocab,).
  std::vector<double> next_log_probs(const Session& session) const;

  /// Ancestral sampling at temperature 1 with EOS forced at max_len.
  /// The returned log-probability equals sequence_logprob of the sample
  /// under the same forced-EOS rule.
  OutlineSample sample_outline(const CondInput& input, std::size_t max_len,
                               Rng& rng) const;

  /// Exact probabilities of every outline over vocab_subset in the
  /// forced-EOS space; total mass is 1 when the subset covers all
  /// non-banned content ids. Errors when |subset|^max_len > 10^6.
  std::vector<OutlineSample> enumerate_outlines(
      const CondInput& input, std::size_t max_len,
      const std::vector<int>& vocab_subset) const;

  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  ModelKind kind_;
  SeqTransformer net_;
  std::vector<int> banned_;

  std::vector<std::uint8_t> banned_row_mask() const;
  std::optional<Var> encode_context_if_any(Tape& t, ParamBinder& b,
                                           const CondInput& input,
                                           Rng* dropout_rng) const;
};

/// Pointerless bundle for the (planning, generation, summarization)
/// triple used by the training objective.
struct ModelTriple {
  std::unique_ptr<Model> planning;
  std::unique_ptr<Model> generation;
  std::unique_ptr<Model> summarization;
};

ModelTriple make_model_triple(const TransformerConfig& config,
                              std::size_t vocab_size, std::uint64_t seed);

/// Input wiring for a model given the example's title and story and, for
/// the generation model, an outline.
CondInput input_for(const Model& model, const TokenSeq& title,
                    const TokenSeq& story,
                    const std::optional<TokenSeq>& outline = std::nullopt);

/// A StoryExample rendered into model ids. Outlines clip to the
/// forced-EOS bound, stories to max_story_len.
struct EncodedExample {
  std::string id;
  TokenSeq title;
  TokenSeq story;
  std::optional<TokenSeq> outline;
};

EncodedExample encode_example(const StoryExample& example,
                              const Vocabulary& vocab,
                              std::size_t max_outline_len,
                              std::size_t max_story_len);

std::vector<EncodedExample> encode_corpus(
    const std::vector<StoryExample>& examples, const Vocabulary& vocab,
    std::size_t max_outline_len, std::size_t max_story_len);

}  // namespace latentplot
