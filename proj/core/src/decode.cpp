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

#include "latentplot/decode.hpp"

#include <algorithm>
#include <cmath>

#include "latentplot/common.hpp"

namespace latentplot {

namespace {

double adjusted(double logprob, std::size_t len, double length_penalty) {
  if (length_penalty <= 0.0) return logprob;
  return logprob / std::pow(static_cast<double>(len + 1), length_penalty);
}

}  // namespace

BeamResult beam_search(const Model& model, const CondInput& input,
                       std::size_t beam, std::size_t max_len,
                       double length_penalty) {
  if (beam < 1) throw Error("beam_search: beam must be at least 1");
  if (max_len < 1) throw Error("beam_search: max_len must be at least 1");

  struct Active {
    Model::Session session;
    std::vector<int> ids;
    double logprob = 0.0;
  };

  std::vector<std::uint8_t> banned(model.vocab_size(), 0);
  for (int id : model.banned_ids()) banned[static_cast<std::size_t>(id)] = 1;
  const int eos = model.eos_id();

  std::optional<BeamResult> best;
  std::optional<double> best_adjusted;
  auto offer = [&](const std::vector<int>& ids, double logprob) {
    const double adj = adjusted(logprob, ids.size(), length_penalty);
    if (!best || adj > *best_adjusted) {
      best = BeamResult{ids, logprob};
      best_adjusted = adj;
    }
  };

  std::vector<Active> active;
  active.push_back({model.begin(input), {}, 0.0});

  for (std::size_t len = 0; len <= max_len && !active.empty(); ++len) {
    if (len == max_len) {
      // EOS forced with probability one; no score contribution
      for (const Active& h : active) offer(h.ids, h.logprob);
      break;
    }

    struct Expansion {
      double logprob;
      std::size_t hyp;
      int token;
    };
    std::vector<Expansion> expansions;
    expansions.reserve(active.size() * model.vocab_size());
    for (std::size_t hi = 0; hi < active.size(); ++hi) {
      const std::vector<double> lp = model.next_log_probs(active[hi].session);
      for (std::size_t id = 0; id < lp.size(); ++id) {
        if (banned[id]) continue;
        const double cand = active[hi].logprob + lp[id];
        if (static_cast<int>(id) == eos) {
          // finished hypotheses retire out of the beam
          offer(active[hi].ids, cand);
        } else {
          expansions.push_back({cand, hi, static_cast<int>(id)});
        }
      }
    }

    std::sort(expansions.begin(), expansions.end(),
              [](const Expansion& a, const Expansion& b) {
                if (a.logprob != b.logprob) return a.logprob > b.logprob;
                if (a.hyp != b.hyp) return a.hyp < b.hyp;
                return a.token < b.token;
              });
    if (expansions.size() > beam) expansions.resize(beam);

    // extensions only lower raw log-probability, so a finished
    // hypothesis at least as good as every survivor is optimal
    if (length_penalty <= 0.0 && best &&
        (expansions.empty() || *best_adjusted >= expansions.front().logprob))
      break;

    std::vector<Active> next;
    next.reserve(expansions.size());
    for (const Expansion& e : expansions) {
      Active child{active[e.hyp].session, active[e.hyp].ids, e.logprob};
      model.advance(child.session, e.token);
      child.ids.push_back(e.token);
      next.push_back(std::move(child));
    }
    active = std::move(next);
  }

  if (!best) throw Error("beam_search: no hypothesis finished");
  return *best;
}

GeneratedStory generate_story(const Model& planning, const Model& generation,
                              const TokenSeq& title, std::size_t beam,
                              std::size_t max_outline_len,
                              std::size_t max_story_len, double length_penalty) {
  if (planning.kind() != ModelKind::kPlanning)
    throw Error("generate_story: first model must be the planning model");
  if (generation.kind() != ModelKind::kGeneration &&
      generation.kind() != ModelKind::kDirect)
    throw Error("generate_story: second model must generate stories");

  const BeamResult outline = beam_search(
      planning, CondInput{title, std::nullopt}, beam, max_outline_len,
      length_penalty);

  TokenSeq z{outline.ids, Role::kOutline};
  CondInput story_input =
      generation.kind() == ModelKind::kDirect
          ? CondInput{title, std::nullopt}
          : CondInput{title, z};
  const BeamResult story = beam_search(generation, story_input, beam,
                                       max_story_len, length_penalty);

  return GeneratedStory{outline.ids, story.ids, outline.score, story.score};
}

}  // namespace latentplot
