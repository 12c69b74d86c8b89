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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace latentplot {

/// One (title, story) record. The outline is attached by the prepare
/// step and is always a verbatim sentence of the story.
struct StoryExample {
  std::string id;
  std::string title;  // empty = not yet derived
  std::string story;
  std::optional<std::string> outline;

  bool operator==(const StoryExample&) const = default;
};

struct DatasetSplit {
  std::vector<StoryExample> train;
  std::vector<StoryExample> valid;
  std::vector<StoryExample> test;
};

struct SplitRatios {
  int train = 8;
  int valid = 1;
  int test = 1;
};

enum class DataFormat { kTsv, kJsonLines };

/// Picks the format from the file extension (.tsv / .jsonl or .json).
DataFormat format_for_path(const std::filesystem::path& path);

/// Splits text into sentences on ".", "!" or "?" followed by whitespace
/// or end of text; the terminator stays attached to its sentence.
std::vector<std::string> split_sentences(const std::string& text);

/// Loads a dataset file. TSV records are `id<TAB>title<TAB>story` (empty
/// title column = derive later); JSON-lines records carry keys id,
/// title (optional), story, outline (optional). Malformed records raise
/// an error naming the line number.
std::vector<StoryExample> load_dataset(const std::filesystem::path& path,
                                       DataFormat format);

void save_dataset(const std::filesystem::path& path,
                  const std::vector<StoryExample>& examples, DataFormat format);

/// Uses the first sentence as the title and the rest as the story.
/// Errors on single-sentence stories.
StoryExample derive_title_from_story(const StoryExample& example);

/// Seeded shuffle then contiguous partition. valid/test take the floor
/// of their shares and train absorbs the remainder, which reproduces
/// the 8:1:1 = 78,529/9,816/9,816 partition of 98,161 records.
DatasetSplit split_dataset(const std::vector<StoryExample>& examples,
                           SplitRatios ratios, std::uint64_t seed,
                           bool shuffle = true);

}  // namespace latentplot
