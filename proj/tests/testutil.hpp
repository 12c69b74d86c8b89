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

#include <string>
#include <vector>

#include "latentplot/common.hpp"
#include "latentplot/config.hpp"
#include "latentplot/corpus.hpp"
#include "latentplot/model.hpp"
#include "latentplot/objective.hpp"
#include "latentplot/rng.hpp"
#include "latentplot/textproc.hpp"

namespace testutil {

using namespace latentplot;

// Tiny model geometry used by the verification oracles: 4 content words
// next to the 5 specials, hidden 8, single-layer stacks. Everything but
// the 4 content ids and EOS is banned, so enumeration over those 4 ids
// covers the entire forced-EOS space.
inline TransformerConfig tiny_config() {
  TransformerConfig c;
  c.hidden = 8;
  c.ffn = 16;
  c.heads = 2;
  c.enc_layers_planning = 1;
  c.enc_layers_generation = 1;
  c.enc_layers_summarization = 1;
  c.enc_layers_context = 1;
  c.dec_layers = 1;
  c.dropout = 0.0;
  c.max_pos = 16;
  return c;
}

constexpr std::size_t kTinyVocab = 9;  // 5 specials + 4 content words

inline std::vector<int> tiny_content_ids() { return {5, 6, 7, 8}; }

inline std::vector<int> tiny_banned() {
  return {Vocabulary::kPad, Vocabulary::kBos, Vocabulary::kSep,
          Vocabulary::kUnk};
}

inline void restrict_to_tiny_space(Model& model) {
  model.set_banned_ids(tiny_banned());
}

inline ModelTriple tiny_triple(std::uint64_t seed) {
  ModelTriple triple = make_model_triple(tiny_config(), kTinyVocab, seed);
  restrict_to_tiny_space(*triple.planning);
  restrict_to_tiny_space(*triple.generation);
  restrict_to_tiny_space(*triple.summarization);
  return triple;
}

inline TokenSeq seq(std::vector<int> ids, Role role) {
  return TokenSeq{std::move(ids), role};
}

inline EncodedExample tiny_example(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "tiny-example"));
  const std::vector<int> content = tiny_content_ids();
  EncodedExample ex;
  ex.id = "tiny-" + std::to_string(seed);
  ex.title.role = Role::kTitle;
  ex.story.role = Role::kStory;
  for (int k = 0; k < 2; ++k)
    ex.title.ids.push_back(content[rng.below(content.size())]);
  for (int k = 0; k < 4; ++k)
    ex.story.ids.push_back(content[rng.below(content.size())]);
  return ex;
}

/// Sets every entry of a parameter tensor.
inline void fill_param(Param& p, double value) {
  for (std::size_t i = 0; i < p.value.size(); ++i) p.value[i] = value;
}

/// Perturbs all parameters of a set with seeded noise; useful to move a
/// freshly initialized model away from its symmetric starting point.
inline void jitter_params(ParamSet& params, double scale, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "jitter"));
  for (Param* p : params.ordered())
    for (std::size_t i = 0; i < p->value.size(); ++i)
      p->value[i] += scale * rng.normal();
}

// ---- template corpora -----------------------------------------------

/// Small formulaic (title, story) corpus; memorizable at desk scale. The
/// index enumerates name/object/place combinations deterministically.
inline std::vector<StoryExample> toy_corpus(std::size_t count,
                                            std::uint64_t seed) {
  static const std::vector<std::string> names = {
      "anna", "ben", "carla", "dan", "emma", "frank", "grace", "henry"};
  static const std::vector<std::string> objects = {
      "kite", "cake", "boat", "piano", "letter", "puppy", "robot", "drum"};
  static const std::vector<std::string> places = {"park", "school", "market",
                                                  "beach"};
  static const std::vector<std::string> moods = {"happy", "proud", "tired",
                                                 "curious"};
  Rng rng(derive_seed(seed, "toy-corpus"));
  std::vector<StoryExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string& name = names[i % names.size()];
    const std::string& object = objects[(i / names.size()) % objects.size()];
    const std::string& place = places[rng.below(places.size())];
    const std::string& mood = moods[rng.below(moods.size())];
    StoryExample ex;
    ex.id = "toy-" + std::to_string(i);
    ex.title = name + " and the " + object;
    ex.story = name + " wanted a " + object + " . " + name + " went to the " +
               place + " . the " + object + " made " + name + " " + mood + " .";
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace testutil
