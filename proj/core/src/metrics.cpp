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

#include "latentplot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "latentplot/common.hpp"
#include "latentplot/decode.hpp"
#include "latentplot/rng.hpp"

namespace latentplot {

namespace {

void check_paired(const std::vector<Tokens>& hyps,
                  const std::vector<Tokens>& refs, const char* what) {
  if (hyps.size() != refs.size())
    throw Error(fmt::format("{}: {} hypotheses against {} references", what,
                            hyps.size(), refs.size()));
  if (hyps.empty()) throw Error(fmt::format("{}: empty corpus", what));
}

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts ngram_counts(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      key += tokens[i + j];
      key += '\x1f';
    }
    ++counts[key];
  }
  return counts;
}

struct BleuStats {
  std::size_t match[4] = {0, 0, 0, 0};
  std::size_t total[4] = {0, 0, 0, 0};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  void add(const Tokens& hyp, const Tokens& ref) {
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const NgramCounts hc = ngram_counts(hyp, n);
      const NgramCounts rc = ngram_counts(ref, n);
      for (const auto& [gram, count] : hc) {
        const auto it = rc.find(gram);
        if (it != rc.end()) match[n - 1] += std::min(count, it->second);
      }
      total[n - 1] += hyp.size() >= n ? hyp.size() - n + 1 : 0;
    }
  }

  double score() const {
    double log_prec = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
      if (match[n] == 0 || total[n] == 0) return 0.0;
      log_prec += std::log(static_cast<double>(match[n]) /
                           static_cast<double>(total[n]));
    }
    double bp = 1.0;
    if (hyp_len < ref_len && hyp_len > 0)
      bp = std::exp(1.0 - static_cast<double>(ref_len) /
                              static_cast<double>(hyp_len));
    if (hyp_len == 0) return 0.0;
    return bp * std::exp(log_prec / 4.0);
  }
};

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ---- METEOR alignment ------------------------------------------------

// Exact-match unigram alignment: maximize matched pairs, then minimize
// the number of chunks (maximal runs of adjacent pairs). Exhaustive
// search with pruning; a deterministic greedy fallback guards against
// pathological duplicate-heavy inputs.
struct AlignmentSearch {
  const Tokens& hyp;
  const Tokens& ref;
  std::size_t max_matches = 0;
  std::size_t best_chunks = 0;
  bool budget_hit = false;
  std::size_t nodes = 0;
  static constexpr std::size_t kNodeBudget = 200000;

  std::vector<std::uint8_t> ref_used;
  // suffix_possible[i] = max matches obtainable from hyp position i on,
  // ignoring ref-side exclusivity (an upper bound)
  std::vector<std::size_t> suffix_possible;
  std::unordered_map<std::string, std::size_t> ref_counts;

  AlignmentSearch(const Tokens& h, const Tokens& r) : hyp(h), ref(r) {
    for (const std::string& t : ref) ++ref_counts[t];
    // exact max matches: sum over tokens of min(count_hyp, count_ref)
    std::unordered_map<std::string, std::size_t> hyp_counts;
    for (const std::string& t : hyp) ++hyp_counts[t];
    for (const auto& [tok, hc] : hyp_counts) {
      const auto it = ref_counts.find(tok);
      if (it != ref_counts.end()) max_matches += std::min(hc, it->second);
    }
    suffix_possible.assign(hyp.size() + 1, 0);
    for (std::size_t i = hyp.size(); i-- > 0;) {
      suffix_possible[i] = suffix_possible[i + 1] +
                           (ref_counts.contains(hyp[i]) ? 1 : 0);
    }
    ref_used.assign(ref.size(), 0);
  }

  // dfs over hyp positions; prev_ref = ref index matched at hyp position
  // i-1 (or npos), used for chunk counting
  void dfs(std::size_t i, std::size_t matched, std::size_t chunks,
           std::size_t prev_ref) {
    if (budget_hit) return;
    if (++nodes > kNodeBudget) {
      budget_hit = true;
      return;
    }
    if (matched + suffix_possible[i] < max_matches) return;  // cannot reach max
    if (chunks >= best_chunks && best_chunks != 0) return;   // cannot improve
    if (i == hyp.size()) {
      if (matched == max_matches &&
          (best_chunks == 0 || chunks < best_chunks))
        best_chunks = chunks;
      return;
    }
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (ref_used[j] || ref[j] != hyp[i]) continue;
      const bool contiguous = prev_ref != static_cast<std::size_t>(-1) &&
                              j == prev_ref + 1;
      ref_used[j] = 1;
      dfs(i + 1, matched + 1, chunks + (contiguous ? 0 : 1), j);
      ref_used[j] = 0;
    }
    // leave hyp[i] unmatched
    dfs(i + 1, matched, chunks, static_cast<std::size_t>(-1));
  }

  // deterministic fallback: prefer the ref position continuing the run,
  // else the leftmost free occurrence
  std::size_t greedy_chunks() {
    std::fill(ref_used.begin(), ref_used.end(), 0);
    std::unordered_map<std::string, std::size_t> remaining = ref_counts;
    std::size_t chunks = 0, prev_ref = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      auto it = remaining.find(hyp[i]);
      if (it == remaining.end() || it->second == 0) {
        prev_ref = static_cast<std::size_t>(-1);
        continue;
      }
      std::size_t pick = static_cast<std::size_t>(-1);
      if (prev_ref != static_cast<std::size_t>(-1) &&
          prev_ref + 1 < ref.size() && !ref_used[prev_ref + 1] &&
          ref[prev_ref + 1] == hyp[i]) {
        pick = prev_ref + 1;
      } else {
        for (std::size_t j = 0; j < ref.size(); ++j)
          if (!ref_used[j] && ref[j] == hyp[i]) {
            pick = j;
            break;
          }
      }
      if (pick == static_cast<std::size_t>(-1)) {
        prev_ref = static_cast<std::size_t>(-1);
        continue;
      }
      ref_used[pick] = 1;
      --it->second;
      chunks += (prev_ref != static_cast<std::size_t>(-1) &&
                 pick == prev_ref + 1)
                    ? 0
                    : 1;
      prev_ref = pick;
    }
    return chunks;
  }

  std::size_t solve() {
    if (max_matches == 0) return 0;
    best_chunks = 0;
    dfs(0, 0, 0, static_cast<std::size_t>(-1));
    if (best_chunks == 0) return greedy_chunks();
    if (budget_hit) return std::min(best_chunks, greedy_chunks());
    return best_chunks;
  }
};

double meteor_pair(const Tokens& hyp, const Tokens& ref) {
  if (hyp == ref) return 1.0;  // perfect alignment carries no penalty
  if (hyp.empty() || ref.empty()) return 0.0;
  AlignmentSearch search(hyp, ref);
  if (search.max_matches == 0) return 0.0;
  const std::size_t chunks = search.solve();
  const double m = static_cast<double>(search.max_matches);
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  const double f_mean = (p * r) / (0.9 * p + 0.1 * r);
  const double frag = static_cast<double>(chunks) / m;
  const double penalty = 0.5 * frag * frag * frag;
  return f_mean * (1.0 - penalty);
}

}  // namespace

double bleu4(const std::vector<Tokens>& hypotheses,
             const std::vector<Tokens>& references) {
  check_paired(hypotheses, references, "bleu4");
  BleuStats stats;
  for (std::size_t i = 0; i < hypotheses.size(); ++i)
    stats.add(hypotheses[i], references[i]);
  return stats.score();
}

double rouge_l(const std::vector<Tokens>& hypotheses,
               const std::vector<Tokens>& references) {
  check_paired(hypotheses, references, "rouge_l");
  double acc = 0.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const Tokens& hyp = hypotheses[i];
    const Tokens& ref = references[i];
    const std::size_t lcs = lcs_length(hyp, ref);
    if (lcs == 0 || hyp.empty() || ref.empty()) continue;
    const double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
    const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
    acc += 2.0 * p * r / (p + r);
  }
  return acc / static_cast<double>(hypotheses.size());
}

double meteor_lite(const std::vector<Tokens>& hypotheses,
                   const std::vector<Tokens>& references) {
  check_paired(hypotheses, references, "meteor_lite");
  double acc = 0.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i)
    acc += meteor_pair(hypotheses[i], references[i]);
  return acc / static_cast<double>(hypotheses.size());
}

double perplexity(const Model& generation, const Model& planning,
                  const std::vector<EncodedExample>& test, std::size_t beam,
                  std::size_t max_outline_len) {
  if (test.empty()) throw Error("perplexity: empty test set");
  double total_logprob = 0.0;
  std::size_t total_tokens = 0;
  for (const EncodedExample& ex : test) {
    const BeamResult z = beam_search(
        planning, CondInput{ex.title, std::nullopt}, beam, max_outline_len);
    TokenSeq outline{z.ids, Role::kOutline};
    const CondInput input = input_for(generation, ex.title, ex.story, outline);
    total_logprob += generation.sequence_logprob(input, ex.story);
    total_tokens += ex.story.ids.size() + 1;  // content tokens plus EOS
  }
  return std::exp(-total_logprob / static_cast<double>(total_tokens));
}

double paired_bootstrap(const std::vector<Tokens>& system_a,
                        const std::vector<Tokens>& system_b,
                        const std::vector<Tokens>& references,
                        const CorpusMetric& metric, std::size_t resamples,
                        std::uint64_t seed) {
  check_paired(system_a, references, "paired_bootstrap");
  if (system_b.size() != references.size())
    throw Error("paired_bootstrap: system outputs are not aligned");
  if (resamples == 0) throw Error("paired_bootstrap: resamples must be >= 1");

  Rng rng(derive_seed(seed, "bootstrap"));
  const std::size_t n = references.size();
  std::size_t b_wins = 0;
  std::vector<Tokens> sample_a(n), sample_b(n), sample_ref(n);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = static_cast<std::size_t>(rng.below(n));
      sample_a[i] = system_a[pick];
      sample_b[i] = system_b[pick];
      sample_ref[i] = references[pick];
    }
    if (metric(sample_b, sample_ref) >= metric(sample_a, sample_ref)) ++b_wins;
  }
  return static_cast<double>(b_wins) / static_cast<double>(resamples);
}

std::map<std::size_t, double> bucket_by_title_length(
    const std::vector<Tokens>& titles, const std::vector<Tokens>& hypotheses,
    const std::vector<Tokens>& references,
    std::map<std::size_t, std::size_t>* counts) {
  check_paired(hypotheses, references, "bucket_by_title_length");
  if (titles.size() != references.size())
    throw Error("bucket_by_title_length: titles are not aligned");
  std::map<std::size_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < titles.size(); ++i)
    buckets[titles[i].size()].push_back(i);
  std::map<std::size_t, double> out;
  for (const auto& [len, idx] : buckets) {
    std::vector<Tokens> hyp, ref;
    hyp.reserve(idx.size());
    ref.reserve(idx.size());
    for (std::size_t i : idx) {
      hyp.push_back(hypotheses[i]);
      ref.push_back(references[i]);
    }
    out[len] = bleu4(hyp, ref);
    if (counts != nullptr) (*counts)[len] = idx.size();
  }
  return out;
}

MetricReport evaluate_corpus(const std::vector<Tokens>& titles,
                             const std::vector<Tokens>& hypotheses,
                             const std::vector<Tokens>& references) {
  MetricReport report;
  report.bleu4 = bleu4(hypotheses, references);
  report.rouge_l = rouge_l(hypotheses, references);
  report.meteor_lite = meteor_lite(hypotheses, references);
  report.example_count = references.size();
  report.bleu_by_title_length = bucket_by_title_length(
      titles, hypotheses, references, &report.bucket_counts);
  return report;
}

std::string report_to_text(const MetricReport& r) {
  std::string out;
  out += fmt::format("examples     {}\n", r.example_count);
  out += fmt::format("BLEU-4       {:.2f}\n", 100.0 * r.bleu4);
  out += fmt::format("METEOR-lite  {:.2f}  (exact match only)\n",
                     100.0 * r.meteor_lite);
  out += fmt::format("ROUGE-L      {:.2f}\n", 100.0 * r.rouge_l);
  if (r.ppl)
    out += fmt::format("PPL          {:.2f}\n", *r.ppl);
  else
    out += "PPL          n/a (no checkpoints given)\n";
  if (!r.bleu_by_title_length.empty()) {
    out += "BLEU by title length:\n";
    for (const auto& [len, b] : r.bleu_by_title_length)
      out += fmt::format("  {:>2} words  {:.2f}  ({} examples)\n", len,
                         100.0 * b, r.bucket_counts.at(len));
  }
  return out;
}

std::string report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["example_count"] = r.example_count;
  j["bleu4"] = r.bleu4;
  j["meteor_lite"] = r.meteor_lite;
  j["rouge_l"] = r.rouge_l;
  if (r.ppl) j["ppl"] = *r.ppl;
  nlohmann::json buckets = nlohmann::json::object();
  for (const auto& [len, b] : r.bleu_by_title_length) {
    nlohmann::json entry;
    entry["bleu4"] = b;
    entry["count"] = r.bucket_counts.at(len);
    buckets[std::to_string(len)] = entry;
  }
  j["by_title_length"] = buckets;
  return j.dump(2);
}

}  // namespace latentplot
