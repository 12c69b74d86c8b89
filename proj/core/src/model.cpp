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

#include "latentplot/model.hpp"

#include <cmath>

#include "latentplot/common.hpp"
#include "latentplot/linalg.hpp"
#include "latentplot/rng.hpp"

namespace latentplot {

namespace {

SeqTransformer::Dims dims_for(ModelKind kind, const TransformerConfig& c,
                              std::size_t vocab) {
  c.validate();
  SeqTransformer::Dims d;
  d.vocab = vocab;
  d.hidden = c.hidden;
  d.ffn = c.ffn;
  d.heads = c.heads;
  d.ctx_layers = c.enc_layers_context;
  d.dec_layers = c.dec_layers;
  d.max_pos = c.max_pos;
  d.dropout = c.dropout;
  switch (kind) {
    case ModelKind::kPlanning:
      d.enc_layers = c.enc_layers_planning;
      d.multi_source = false;
      break;
    case ModelKind::kGeneration:
      d.enc_layers = c.enc_layers_generation;
      d.multi_source = true;
      break;
    case ModelKind::kSummarization:
      d.enc_layers = c.enc_layers_summarization;
      d.multi_source = true;
      break;
    case ModelKind::kDirect:
      d.enc_layers = c.enc_layers_generation;
      d.multi_source = false;
      break;
  }
  return d;
}

const char* role_name(Role r) {
  switch (r) {
    case Role::kTitle: return "title";
    case Role::kOutline: return "outline";
    case Role::kStory: return "story";
  }
  return "?";
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPlanning: return "planning";
    case ModelKind::kGeneration: return "generation";
    case ModelKind::kSummarization: return "summarization";
    case ModelKind::kDirect: return "direct";
  }
  return "?";
}

Model::Model(ModelKind kind, const TransformerConfig& config,
             std::size_t vocab_size, std::uint64_t seed)
    : kind_(kind),
      net_(dims_for(kind, config, vocab_size), seed),
      banned_{Vocabulary::kPad, Vocabulary::kBos, Vocabulary::kSep} {}

std::unique_ptr<Model> Model::planning(const TransformerConfig& c,
                                       std::size_t vocab, std::uint64_t seed) {
  return std::make_unique<Model>(ModelKind::kPlanning, c, vocab, seed);
}

std::unique_ptr<Model> Model::generation(const TransformerConfig& c,
                                         std::size_t vocab, std::uint64_t seed) {
  return std::make_unique<Model>(ModelKind::kGeneration, c, vocab, seed);
}

std::unique_ptr<Model> Model::summarization(const TransformerConfig& c,
                                            std::size_t vocab,
                                            std::uint64_t seed) {
  return std::make_unique<Model>(ModelKind::kSummarization, c, vocab, seed);
}

std::unique_ptr<Model> Model::direct(const TransformerConfig& c,
                                     std::size_t vocab, std::uint64_t seed) {
  return std::make_unique<Model>(ModelKind::kDirect, c, vocab, seed);
}

Role Model::main_role() const {
  return kind_ == ModelKind::kSummarization ? Role::kStory : Role::kTitle;
}

std::optional<Role> Model::context_role() const {
  switch (kind_) {
    case ModelKind::kGeneration: return Role::kOutline;
    case ModelKind::kSummarization: return Role::kTitle;
    default: return std::nullopt;
  }
}

Role Model::target_role() const {
  return kind_ == ModelKind::kGeneration || kind_ == ModelKind::kDirect
             ? Role::kStory
             : Role::kOutline;
}

void Model::set_banned_ids(std::vector<int> ids) {
  // EOS may be banned too: the forced-EOS rule still terminates every
  // sequence at max_len, so the space stays proper.
  banned_ = std::move(ids);
}

void Model::check_input(const CondInput& input, Role target) const {
  if (input.main.role != main_role())
    throw Error("model " + to_string(kind_) + ": main input is " +
                role_name(input.main.role) + ", expected " +
                role_name(main_role()));
  const std::optional<Role> ctx = context_role();
  if (input.context.has_value()) {
    if (!ctx)
      throw Error("model " + to_string(kind_) + ": no context input expected");
    if (input.context->role != *ctx)
      throw Error("model " + to_string(kind_) + ": context input is " +
                  role_name(input.context->role) + ", expected " +
                  role_name(*ctx));
  }
  if (target != target_role())
    throw Error("model " + to_string(kind_) + ": target is " +
                role_name(target) + ", expected " + role_name(target_role()));
}

std::vector<std::uint8_t> Model::banned_row_mask() const {
  std::vector<std::uint8_t> mask(vocab_size(), 0);
  for (int id : banned_) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size())
      throw Error("model: banned id out of range");
    mask[static_cast<std::size_t>(id)] = 1;
  }
  return mask;
}

std::optional<Var> Model::encode_context_if_any(Tape& t, ParamBinder& b,
                                                const CondInput& input,
                                                Rng* dropout_rng) const {
  if (!net_.dims().multi_source) return std::nullopt;
  if (!input.context.has_value() || input.context->ids.empty())
    return std::nullopt;
  return net_.context_encode(t, b, input.context->ids, dropout_rng);
}

Var Model::logprob_on_tape(Tape& t, ParamBinder& b, const CondInput& input,
                           const TokenSeq& target,
                           std::optional<std::size_t> forced_eos_max,
                           Rng* dropout_rng) const {
  check_input(input, target.role);
  const std::vector<int>& ids = target.ids;
  if (forced_eos_max) {
    if (*forced_eos_max < 1)
      throw Error("model: forced-EOS bound must be at least 1");
    if (ids.size() > *forced_eos_max)
      throw Error("model: target of " + std::to_string(ids.size()) +
                  " tokens outside the forced-EOS space of " +
                  std::to_string(*forced_eos_max));
  }
  const bool at_cap = forced_eos_max && ids.size() == *forced_eos_max;

  std::vector<int> dec_in;
  dec_in.reserve(ids.size() + 1);
  dec_in.push_back(bos_id());
  for (std::size_t i = 0; i + (at_cap ? 1 : 0) < ids.size(); ++i)
    dec_in.push_back(ids[i]);
  std::vector<int> targets = ids;
  if (!at_cap) targets.push_back(eos_id());

  std::optional<Var> ctx = encode_context_if_any(t, b, input, dropout_rng);
  Var enc = net_.encode(t, b, input.main.ids, ctx, dropout_rng);
  Var logits = net_.decode_teacher_forced(t, b, dec_in, enc, ctx, dropout_rng);

  // ban structural specials from the predictive distribution
  const std::vector<std::uint8_t> row = banned_row_mask();
  std::vector<std::uint8_t> mask(targets.size() * vocab_size());
  for (std::size_t i = 0; i < targets.size(); ++i)
    std::copy(row.begin(), row.end(), mask.begin() + i * vocab_size());
  logits = mask_fill(t, logits, mask, linalg::kMaskValue);

  Var nll = cross_entropy(t, logits, targets);
  return scale(t, sum(t, nll), -1.0);
}

double Model::sequence_logprob(const CondInput& input, const TokenSeq& target,
                               std::optional<std::size_t> forced_eos_max) const {
  Tape tape;
  ParamBinder binder(tape, /*trainable=*/false);
  Var lp = logprob_on_tape(tape, binder, input, target, forced_eos_max);
  return tape.value(lp).item();
}

// ---- incremental decoding ---------------------------------------------

Model::Session Model::begin(const CondInput& input) const {
  check_input(input, target_role());
  Tensor ctx_states;
  if (net_.dims().multi_source && input.context.has_value() &&
      !input.context->ids.empty())
    ctx_states = net_.eval_context_encode(input.context->ids);
  Tensor main_states = net_.eval_encode(input.main.ids, ctx_states);
  Session s{net_.begin_decode(std::move(main_states), std::move(ctx_states)),
            Tensor()};
  s.next_logits = net_.decode_step(s.state, bos_id());
  return s;
}

void Model::advance(Session& session, int token) const {
  session.next_logits = net_.decode_step(session.state, token);
}

std::vector<double> Model::next_log_probs(const Session& session) const {
  Tensor row = session.next_logits;
  for (int id : banned_) row[static_cast<std::size_t>(id)] = linalg::kMaskValue;
  Tensor lp = linalg::log_softmax_rows(row);
  return std::vector<double>(lp.data(), lp.data() + lp.size());
}

OutlineSample Model::sample_outline(const CondInput& input, std::size_t max_len,
                                    Rng& rng) const {
  if (max_len < 1) throw Error("sample_outline: max_len must be at least 1");
  Session session = begin(input);
  OutlineSample out;
  while (true) {
    const std::vector<double> lp = next_log_probs(session);
    // candidates with nonzero probability, EOS included
    std::vector<int> cand_ids;
    std::vector<double> cand_w;
    cand_ids.reserve(lp.size());
    for (std::size_t id = 0; id < lp.size(); ++id) {
      const double w = std::exp(lp[id]);
      if (w > 0.0) {
        cand_ids.push_back(static_cast<int>(id));
        cand_w.push_back(w);
      }
    }
    const int tok = cand_ids[rng.categorical(cand_w)];
    if (tok == eos_id()) {
      out.logprob += lp[static_cast<std::size_t>(tok)];
      break;
    }
    out.ids.push_back(tok);
    out.logprob += lp[static_cast<std::size_t>(tok)];
    if (out.ids.size() == max_len) break;  // EOS forced, probability one
    advance(session, tok);
  }
  return out;
}

std::vector<OutlineSample> Model::enumerate_outlines(
    const CondInput& input, std::size_t max_len,
    const std::vector<int>& vocab_subset) const {
  if (max_len < 1) throw Error("enumerate_outlines: max_len must be >= 1");
  const double budget =
      std::pow(static_cast<double>(vocab_subset.size()),
               static_cast<double>(max_len));
  if (budget > 1e6)
    throw Error("enumerate_outlines: |subset|^max_len exceeds the 10^6 budget");
  for (int id : vocab_subset) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size())
      throw Error("enumerate_outlines: subset id out of range");
    if (id == eos_id())
      throw Error("enumerate_outlines: EOS cannot be a content token");
  }

  std::vector<OutlineSample> results;
  std::vector<int> prefix;

  // depth-first walk of the forced-EOS prefix tree
  auto rec = [&](auto&& self, const Session& session, double logp) -> void {
    if (prefix.size() == max_len) {
      results.push_back({prefix, logp});  // EOS forced here
      return;
    }
    const std::vector<double> lp = next_log_probs(session);
    results.push_back(
        {prefix, logp + lp[static_cast<std::size_t>(eos_id())]});
    for (int tok : vocab_subset) {
      Session child = session;
      advance(child, tok);
      prefix.push_back(tok);
      self(self, child, logp + lp[static_cast<std::size_t>(tok)]);
      prefix.pop_back();
    }
  };
  rec(rec, begin(input), 0.0);
  return results;
}

void Model::save(const std::filesystem::path& path) const {
  save_checkpoint(net_.params(), path);
}

void Model::load(const std::filesystem::path& path) {
  load_checkpoint(net_.params(), path);
}

ModelTriple make_model_triple(const TransformerConfig& config,
                              std::size_t vocab_size, std::uint64_t seed) {
  ModelTriple triple;
  triple.planning =
      Model::planning(config, vocab_size, derive_seed(seed, "planning"));
  triple.generation =
      Model::generation(config, vocab_size, derive_seed(seed, "generation"));
  triple.summarization = Model::summarization(
      config, vocab_size, derive_seed(seed, "summarization"));
  return triple;
}

CondInput input_for(const Model& model, const TokenSeq& title,
                    const TokenSeq& story,
                    const std::optional<TokenSeq>& outline) {
  switch (model.kind()) {
    case ModelKind::kPlanning:
      return CondInput{title, std::nullopt};
    case ModelKind::kGeneration:
      return CondInput{title, outline};
    case ModelKind::kSummarization:
      return CondInput{story, title};
    case ModelKind::kDirect:
      return CondInput{title, std::nullopt};
  }
  throw Error("input_for: unknown model kind");
}

EncodedExample encode_example(const StoryExample& example,
                              const Vocabulary& vocab,
                              std::size_t max_outline_len,
                              std::size_t max_story_len) {
  EncodedExample out;
  out.id = example.id;
  out.title = encode(vocab, tokenize(example.title), Role::kTitle);
  out.story = encode(vocab, tokenize(example.story), Role::kStory);
  if (out.title.ids.empty())
    throw Error("encode_example: empty title in record " + example.id);
  if (out.story.ids.empty())
    throw Error("encode_example: empty story in record " + example.id);
  if (out.story.ids.size() > max_story_len)
    out.story.ids.resize(max_story_len);
  if (example.outline) {
    TokenSeq z = encode(vocab, tokenize(*example.outline), Role::kOutline);
    if (z.ids.size() > max_outline_len) z.ids.resize(max_outline_len);
    out.outline = std::move(z);
  }
  return out;
}

std::vector<EncodedExample> encode_corpus(
    const std::vector<StoryExample>& examples, const Vocabulary& vocab,
    std::size_t max_outline_len, std::size_t max_story_len) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const StoryExample& ex : examples)
    out.push_back(encode_example(ex, vocab, max_outline_len, max_story_len));
  return out;
}

}  // namespace latentplot
