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
#include <string>
#include <unordered_map>
#include <vector>

#include "latentplot/corpus.hpp"

namespace latentplot {

enum class Role { kTitle, kOutline, kStory };

/// Word ids in one role. No framing tokens unless explicitly added by
/// encode(..., add_bos_eos = true).
struct TokenSeq {
  std::vector<int> ids;
  Role role = Role::kStory;
};

/// Lowercases, splits punctuation marks into their own tokens, and
/// collapses whitespace. Empty text gives an empty list.
std::vector<std::string> tokenize(const std::string& text);

/// Word inventory shared by all three models. Ids 0..4 are reserved:
/// PAD, BOS, EOS, UNK, SEP.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kSep = 4;
  static constexpr int kNumSpecials = 5;

  /// Ranks tokens of titles+stories by frequency (ties broken
  /// lexicographically) and keeps the `cap` most frequent.
  static Vocabulary build(const std::vector<StoryExample>& corpus,
                          std::size_t cap = 50000);

  /// Vocabulary over an explicit token list (id = position + 5).
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size() + kNumSpecials; }

  /// Id of a surface token; UNK when absent.
  int id_of(const std::string& token) const;

  /// Surface form of an id, including "<pad>"-style names for specials.
  /// Errors on out-of-range ids.
  const std::string& token_of(int id) const;

  bool is_special(int id) const { return id >= 0 && id < kNumSpecials; }

  // One token per line, line number = id - 5; specials are implicit.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> tokens_;              // non-special, by id - 5
  std::unordered_map<std::string, int> ids_;
};

TokenSeq encode(const Vocabulary& vocab, const std::vector<std::string>& tokens,
                Role role, bool add_bos_eos = false);

/// Inverse of encode up to UNK substitution; PAD/BOS/EOS/SEP are
/// stripped, UNK renders as "<unk>". Errors on out-of-range ids.
std::string decode(const Vocabulary& vocab, const TokenSeq& seq);

}  // namespace latentplot
