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

#include "latentplot/sumbasic.hpp"

#include <cctype>
#include <unordered_set>

#include "latentplot/common.hpp"
#include "latentplot/textproc.hpp"

namespace latentplot {

namespace {

// v1 stopword list: English function words, frozen for reproducibility.
const std::unordered_set<std::string>& stopword_set() {
  static const std::unordered_set<std::string> words = {
      "a",      "about",  "above",  "after",   "again",   "against", "all",
      "am",     "an",     "and",    "any",     "are",     "as",      "at",
      "be",     "because", "been",  "before",  "being",   "below",   "between",
      "both",   "but",    "by",     "can",     "cannot",  "could",   "did",
      "do",     "does",   "doing",  "down",    "during",  "each",    "few",
      "for",    "from",   "further", "had",    "has",     "have",    "having",
      "he",     "her",    "here",   "hers",    "herself", "him",     "himself",
      "his",    "how",    "i",      "if",      "in",      "into",    "is",
      "it",     "its",    "itself", "just",    "me",      "more",    "most",
      "my",     "myself", "no",     "nor",     "not",     "now",     "of",
      "off",    "on",     "once",   "only",    "or",      "other",   "our",
      "ours",   "ourselves", "out", "over",    "own",     "same",    "she",
      "should", "so",     "some",   "such",    "than",    "that",    "the",
      "their",  "theirs", "them",   "themselves", "then", "there",   "these",
      "they",   "this",   "those",  "through", "to",      "too",     "under",
      "until",  "up",     "very",   "was",     "we",      "were",    "what",
      "when",   "where",  "which",  "while",   "who",     "whom",    "why",
      "will",   "with",   "would",  "you",     "your",    "yours",   "yourself",
      "yourselves",
  };
  return words;
}

bool is_punct_token(const std::string& token) {
  for (unsigned char c : token)
    if (std::ispunct(c) == 0) return false;
  return !token.empty();
}

bool is_content_word(const std::string& token) {
  return !is_punct_token(token) && !is_stopword(token);
}

}  // namespace

bool is_stopword(const std::string& token) {
  return stopword_set().contains(token);
}

std::map<std::string, double> word_probabilities(
    const std::vector<std::string>& sentences) {
  if (sentences.empty()) throw Error("sumbasic: empty story");
  std::map<std::string, double> counts;
  std::size_t total = 0;
  for (const std::string& sentence : sentences) {
    for (const std::string& tok : tokenize(sentence)) {
      if (!is_content_word(tok)) continue;
      ++counts[tok];
      ++total;
    }
  }
  if (total == 0) throw Error("sumbasic: story has no content words");
  for (auto& [_, c] : counts) c /= static_cast<double>(total);
  return counts;
}

OutlineExtraction extract_outline(const std::vector<std::string>& sentences) {
  const std::map<std::string, double> prob = word_probabilities(sentences);

  OutlineExtraction out;
  out.scores.reserve(sentences.size());
  bool found = false;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const std::string& tok : tokenize(sentences[i])) {
      if (!is_content_word(tok)) continue;
      acc += prob.at(tok);
      ++n;
    }
    const double score = n == 0 ? 0.0 : acc / static_cast<double>(n);
    out.scores.push_back({i, score});
    if (n > 0 && (!found || score > out.scores[out.index].score)) {
      // strict > keeps the earliest sentence on ties
      out.index = i;
      found = true;
    }
  }
  if (!found) throw Error("sumbasic: no sentence with content words");
  out.sentence = sentences[out.index];
  return out;
}

}  // namespace latentplot
