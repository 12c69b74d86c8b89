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

#include <optional>
#include <vector>

#include "latentplot/model.hpp"

namespace latentplot {

struct BeamHypothesis {
  std::vector<int> ids;
  double logprob = 0.0;
  bool finished = false;
};

struct BeamResult {
  std::vector<int> ids;     // content tokens, BOS/EOS stripped
  double score = 0.0;       // forced-EOS log-probability of ids
};

/// Standard beam search over the model's forced-EOS space. Hypotheses
/// finishing on EOS retire out of the beam and compare by raw cumulative
/// log-probability (length_penalty 0); at max_len EOS is forced. Ties
/// break by hypothesis order then token id. beam == 1 is greedy search.
BeamResult beam_search(const Model& model, const CondInput& input,
                       std::size_t beam, std::size_t max_len,
                       double length_penalty = 0.0);

struct GeneratedStory {
  std::vector<int> outline_ids;
  std::vector<int> story_ids;
  double outline_score = 0.0;
  double story_score = 0.0;
};

/// Two-step inference: outline via the planning model, then story via
/// the generation model conditioned on title and decoded outline. The
/// summarization model plays no part here.
GeneratedStory generate_story(const Model& planning, const Model& generation,
                              const TokenSeq& title, std::size_t beam,
                              std::size_t max_outline_len,
                              std::size_t max_story_len,
                              double length_penalty = 0.0);

}  // namespace latentplot
