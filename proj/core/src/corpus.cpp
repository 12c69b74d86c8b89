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

#include "latentplot/corpus.hpp"

#include <fstream>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "latentplot/common.hpp"
#include "latentplot/rng.hpp"

namespace latentplot {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

DataFormat format_for_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".tsv") return DataFormat::kTsv;
  if (ext == ".jsonl" || ext == ".json") return DataFormat::kJsonLines;
  throw Error("dataset: cannot infer format from extension '" + ext +
              "' (want .tsv or .jsonl)");
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == n || is_space(text[i + 1]))) {
      const std::string sent = trim(text.substr(start, i + 1 - start));
      if (!sent.empty()) sentences.push_back(sent);
      start = i + 1;
    }
  }
  const std::string rest = trim(text.substr(start));
  if (!rest.empty()) sentences.push_back(rest);
  return sentences;
}

namespace {

StoryExample parse_tsv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  if (fields.size() != 3)
    throw Error(fmt::format("dataset: line {}: expected 3 tab-separated "
                            "fields, found {}", line_no, fields.size()));
  StoryExample ex;
  ex.id = trim(fields[0]);
  ex.title = trim(fields[1]);
  ex.story = trim(fields[2]);
  if (ex.id.empty())
    throw Error(fmt::format("dataset: line {}: empty id", line_no));
  if (ex.story.empty())
    throw Error(fmt::format("dataset: line {}: empty story", line_no));
  return ex;
}

StoryExample parse_jsonl_line(const std::string& line, std::size_t line_no) {
  nlohmann::json rec;
  try {
    rec = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("dataset: line {}: {}", line_no, e.what()));
  }
  if (!rec.is_object() || !rec.contains("id") || !rec.contains("story"))
    throw Error(fmt::format("dataset: line {}: record needs 'id' and 'story'",
                            line_no));
  StoryExample ex;
  try {
    ex.id = rec.at("id").get<std::string>();
    ex.story = trim(rec.at("story").get<std::string>());
    if (rec.contains("title")) ex.title = trim(rec.at("title").get<std::string>());
    if (rec.contains("outline"))
      ex.outline = rec.at("outline").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("dataset: line {}: {}", line_no, e.what()));
  }
  if (ex.id.empty())
    throw Error(fmt::format("dataset: line {}: empty id", line_no));
  if (ex.story.empty())
    throw Error(fmt::format("dataset: line {}: empty story", line_no));
  return ex;
}

}  // namespace

std::vector<StoryExample> load_dataset(const std::filesystem::path& path,
                                       DataFormat format) {
  std::ifstream is(path);
  if (!is) throw Error("dataset: cannot open " + path.string());
  std::vector<StoryExample> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    examples.push_back(format == DataFormat::kTsv
                           ? parse_tsv_line(line, line_no)
                           : parse_jsonl_line(line, line_no));
  }
  if (examples.empty())
    throw Error("dataset: no records in " + path.string());
  return examples;
}

void save_dataset(const std::filesystem::path& path,
                  const std::vector<StoryExample>& examples,
                  DataFormat format) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("dataset: cannot open " + path.string() + " for write");
  for (const StoryExample& ex : examples) {
    if (format == DataFormat::kTsv) {
      for (const std::string* field : {&ex.id, &ex.title, &ex.story})
        if (field->find_first_of("\t\n") != std::string::npos)
          throw Error("dataset: tab or newline in record " + ex.id +
                      " cannot be written as TSV");
      os << ex.id << '\t' << ex.title << '\t' << ex.story << '\n';
    } else {
      nlohmann::json rec;
      rec["id"] = ex.id;
      if (!ex.title.empty()) rec["title"] = ex.title;
      rec["story"] = ex.story;
      if (ex.outline) rec["outline"] = *ex.outline;
      os << rec.dump() << '\n';
    }
  }
  if (!os) throw Error("dataset: write failed for " + path.string());
}

StoryExample derive_title_from_story(const StoryExample& example) {
  const std::vector<std::string> sentences = split_sentences(example.story);
  if (sentences.size() < 2)
    throw Error("derive_title: story of record " + example.id +
                " has fewer than 2 sentences");
  StoryExample out = example;
  out.title = sentences.front();
  std::string rest;
  for (std::size_t i = 1; i < sentences.size(); ++i) {
    if (i > 1) rest += ' ';
    rest += sentences[i];
  }
  out.story = rest;
  return out;
}

DatasetSplit split_dataset(const std::vector<StoryExample>& examples,
                           SplitRatios ratios, std::uint64_t seed,
                           bool shuffle) {
  if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0)
    throw Error("split: ratios must be positive");
  const std::size_t n = examples.size();
  if (n < 3) throw Error("split: fewer examples than splits");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    Rng rng(derive_seed(seed, "dataset-split"));
    rng.shuffle(order);
  }

  const std::size_t total =
      static_cast<std::size_t>(ratios.train + ratios.valid + ratios.test);
  const std::size_t n_valid = n * static_cast<std::size_t>(ratios.valid) / total;
  const std::size_t n_test = n * static_cast<std::size_t>(ratios.test) / total;
  const std::size_t n_train = n - n_valid - n_test;

  DatasetSplit split;
  split.train.reserve(n_train);
  split.valid.reserve(n_valid);
  split.test.reserve(n_test);
  for (std::size_t i = 0; i < n; ++i) {
    const StoryExample& ex = examples[order[i]];
    if (i < n_train)
      split.train.push_back(ex);
    else if (i < n_train + n_valid)
      split.valid.push_back(ex);
    else
      split.test.push_back(ex);
  }
  return split;
}

}  // namespace latentplot
