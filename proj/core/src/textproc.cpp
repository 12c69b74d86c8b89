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

#include "latentplot/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "latentplot/common.hpp"

namespace latentplot {

namespace {

const std::string kSpecialNames[] = {"<pad>", "<bos>", "<eos>", "<unk>",
                                     "<sep>"};

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }
bool is_ws(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (is_ws(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

Vocabulary Vocabulary::build(const std::vector<StoryExample>& corpus,
                             std::size_t cap) {
  if (corpus.empty()) throw Error("vocab: empty corpus");
  if (cap < 1) throw Error("vocab: cap must be at least 1");

  std::map<std::string, std::size_t> counts;  // ordered: lexicographic ties
  for (const StoryExample& ex : corpus) {
    for (const std::string& tok : tokenize(ex.title)) ++counts[tok];
    for (const std::string& tok : tokenize(ex.story)) ++counts[tok];
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;  // stable keeps lex order
                   });
  if (ranked.size() > cap) ranked.resize(cap);

  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [tok, _] : ranked) tokens.push_back(tok);
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    auto [_, fresh] =
        v.ids_.emplace(v.tokens_[i], static_cast<int>(i) + kNumSpecials);
    if (!fresh) throw Error("vocab: duplicate token '" + v.tokens_[i] + "'");
  }
  return v;
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= size())
    throw Error("vocab: id " + std::to_string(id) + " out of range (size " +
                std::to_string(size()) + ")");
  if (id < kNumSpecials) return kSpecialNames[id];
  return tokens_[static_cast<std::size_t>(id - kNumSpecials)];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("vocab: cannot open " + path.string() + " for write");
  for (const std::string& tok : tokens_) os << tok << '\n';
  if (!os) throw Error("vocab: write failed for " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("vocab: cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

TokenSeq encode(const Vocabulary& vocab, const std::vector<std::string>& tokens,
                Role role, bool add_bos_eos) {
  TokenSeq seq;
  seq.role = role;
  seq.ids.reserve(tokens.size() + (add_bos_eos ? 2 : 0));
  if (add_bos_eos) seq.ids.push_back(Vocabulary::kBos);
  for (const std::string& tok : tokens) seq.ids.push_back(vocab.id_of(tok));
  if (add_bos_eos) seq.ids.push_back(Vocabulary::kEos);
  return seq;
}

std::string decode(const Vocabulary& vocab, const TokenSeq& seq) {
  std::string out;
  for (int id : seq.ids) {
    const std::string& tok = vocab.token_of(id);  // validates the id
    if (vocab.is_special(id) && id != Vocabulary::kUnk) continue;
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

}  // namespace latentplot
