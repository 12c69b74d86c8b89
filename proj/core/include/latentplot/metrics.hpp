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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latentplot/model.hpp"

namespace latentplot {

using Tokens = std::vector<std::string>;

/// Corpus-level BLEU-4: geometric mean of clipped 1..4-gram precisions
/// with brevity penalty, no smoothing. Zero when any order has no match.
double bleu4(const std::vector<Tokens>& hypotheses,
             const std::vector<Tokens>& references);

/// Mean over pairs of LCS-based F1 (beta = 1).
double rouge_l(const std::vector<Tokens>& hypotheses,
               const std::vector<Tokens>& references);

/// Exact-match METEOR: unigram alignment maximizing matches then
/// minimizing chunks, F_mean = P*R / (0.9*P + 0.1*R), fragmentation
/// penalty 0.5*(chunks/matches)^3. No stemming or synonymy stages, so
/// scores are not comparable with the official tool. A verbatim match
/// scores exactly 1.
double meteor_lite(const std::vector<Tokens>& hypotheses,
                   const std::vector<Tokens>& references);

/// Test-set perplexity of the generation model conditioned on the
/// planning model's beam-decoded outline:
/// exp(-sum log P(y_t | x, z_hat, y_<t) / total story tokens).
double perplexity(const Model& generation, const Model& planning,
                  const std::vector<EncodedExample>& test,
                  std::size_t beam, std::size_t max_outline_len);

using CorpusMetric =
    std::function<double(const std::vector<Tokens>&, const std::vector<Tokens>&)>;

/// One-sided paired bootstrap: the fraction of resamples where system B
/// scores at least as high as system A (ties count for B).
double paired_bootstrap(const std::vector<Tokens>& system_a,
                        const std::vector<Tokens>& system_b,
                        const std::vector<Tokens>& references,
                        const CorpusMetric& metric, std::size_t resamples,
                        std::uint64_t seed);

struct MetricReport {
  double bleu4 = 0.0;
  double meteor_lite = 0.0;
  double rouge_l = 0.0;
  std::optional<double> ppl;
  std::map<std::size_t, double> bleu_by_title_length;
  std::map<std::size_t, std::size_t> bucket_counts;
  std::size_t example_count = 0;
};

/// Corpus BLEU per title-token-count bucket; empty buckets are omitted.
std::map<std::size_t, double> bucket_by_title_length(
    const std::vector<Tokens>& titles, const std::vector<Tokens>& hypotheses,
    const std::vector<Tokens>& references,
    std::map<std::size_t, std::size_t>* counts = nullptr);

MetricReport evaluate_corpus(const std::vector<Tokens>& titles,
                             const std::vector<Tokens>& hypotheses,
                             const std::vector<Tokens>& references);

std::string report_to_text(const MetricReport& report);
std::string report_to_json(const MetricReport& report);

}  // namespace latentplot
