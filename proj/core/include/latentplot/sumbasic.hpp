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

#include <map>
#include <string>
#include <vector>

namespace latentplot {

// Frequency-based single-sentence extractor. A sentence scores the mean
// corpus probability of its content words; the best-scoring sentence of
// the story becomes its raw outline.

struct SentenceScore {
  std::size_t index = 0;
  double score = 0.0;  // mean content-word probability, in [0,1]
};

struct OutlineExtraction {
  std::string sentence;  // verbatim copy of the winning input sentence
  std::size_t index = 0;
  std::vector<SentenceScore> scores;  // one entry per input sentence
};

/// Fixed, versioned list of English function words excluded from
/// scoring (plus all pure-punctuation tokens).
bool is_stopword(const std::string& token);

/// p(w) = count(w) / total content-word count over the story.
/// Stopwords and punctuation are excluded; errors when the story has
/// no content words at all.
std::map<std::string, double> word_probabilities(
    const std::vector<std::string>& sentences);

/// The sentence with the highest mean content-word probability; ties go
/// to the earlier sentence. Sentences without content words score 0.
OutlineExtraction extract_outline(const std::vector<std::string>& sentences);

}  // namespace latentplot
