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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "latentplot/corpus.hpp"
#include "latentplot/sumbasic.hpp"
#include "latentplot/textproc.hpp"
#include "testutil.hpp"

using namespace latentplot;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::trunc);
  os << content;
}

}  // namespace

// ---- corpus -----------------------------------------------------------

TEST_CASE("sentence splitter keeps terminators attached") {
  auto s = split_sentences("A. B. C.");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "A.");
  CHECK(s[1] == "B.");
  CHECK(s[2] == "C.");

  auto t = split_sentences("Really?! Yes. trailing words");
  REQUIRE(t.size() == 3);
  CHECK(t[0] == "Really?!");
  CHECK(t[1] == "Yes.");
  CHECK(t[2] == "trailing words");

  CHECK(split_sentences("No end yet").size() == 1);
  CHECK(split_sentences("Mr. Smith ran.").size() == 2);  // rule is literal
}

TEST_CASE("tsv loading is literal and order-preserving") {
  const auto path = temp_file("lp_corpus.tsv");
  write_file(path,
             "a1\tMartin writes a book\tMartin sat down. He wrote all day.\n"
             "a2\t\tFirst line here. Second line there.\n"
             "a3\tT\tOne sentence only.\n");
  auto examples = load_dataset(path, DataFormat::kTsv);
  REQUIRE(examples.size() == 3);
  CHECK(examples[0].id == "a1");
  CHECK(examples[0].title == "Martin writes a book");
  CHECK(examples[1].title.empty());  // pending derive_title
  CHECK(examples[2].story == "One sentence only.");
  std::filesystem::remove(path);
}

TEST_CASE("malformed records raise errors naming the line") {
  const auto path = temp_file("lp_corpus_bad.tsv");
  write_file(path, "a1\tok\tStory one.\nbad-line-without-tabs\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, DataFormat::kTsv),
                       doctest::Contains("line 2"), Error);

  write_file(path, "a1\tok\t\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, DataFormat::kTsv),
                       doctest::Contains("empty story"), Error);

  write_file(path, "");
  CHECK_THROWS_AS(load_dataset(path, DataFormat::kTsv), Error);
  std::filesystem::remove(path);
}

TEST_CASE("jsonl records parse with optional fields") {
  const auto path = temp_file("lp_corpus.jsonl");
  write_file(path,
             R"({"id":"j1","title":"A trip","story":"We left. We came back."})"
             "\n"
             R"({"id":"j2","story":"No title. Derive me."})"
             "\n"
             R"({"id":"j3","title":"T","story":"S one. S two.","outline":"S one."})"
             "\n");
  auto examples = load_dataset(path, DataFormat::kJsonLines);
  REQUIRE(examples.size() == 3);
  CHECK(examples[0].title == "A trip");
  CHECK(examples[1].title.empty());
  REQUIRE(examples[2].outline.has_value());
  CHECK(*examples[2].outline == "S one.");
  std::filesystem::remove(path);
}

TEST_CASE("datasets round-trip through both formats") {
  Rng rng(3);
  std::vector<StoryExample> examples = testutil::toy_corpus(17, 5);
  examples[3].outline = split_sentences(examples[3].story)[1];

  for (DataFormat format : {DataFormat::kTsv, DataFormat::kJsonLines}) {
    const auto path = temp_file(format == DataFormat::kTsv ? "lp_rt.tsv"
                                                           : "lp_rt.jsonl");
    if (format == DataFormat::kTsv) {
      // TSV has no outline column
      auto no_outline = examples;
      for (auto& ex : no_outline) ex.outline.reset();
      save_dataset(path, no_outline, format);
      CHECK(load_dataset(path, format) == no_outline);
    } else {
      save_dataset(path, examples, format);
      CHECK(load_dataset(path, format) == examples);
    }
    std::filesystem::remove(path);
  }
}

TEST_CASE("derive_title_from_story moves the first sentence") {
  StoryExample ex{"d1", "", "A. B. C.", std::nullopt};
  StoryExample out = derive_title_from_story(ex);
  CHECK(out.title == "A.");
  CHECK(out.story == "B. C.");

  StoryExample two{"d2", "", "First one. Second one.", std::nullopt};
  StoryExample out2 = derive_title_from_story(two);
  CHECK(out2.title == "First one.");
  CHECK(out2.story == "Second one.");

  StoryExample single{"d3", "", "Only one sentence.", std::nullopt};
  CHECK_THROWS_AS(derive_title_from_story(single), Error);
}

TEST_CASE("derive_title preserves the sentence multiset") {
  Rng rng(9);
  auto corpus = testutil::toy_corpus(25, 11);
  for (const StoryExample& ex : corpus) {
    const auto before = split_sentences(ex.story);
    if (before.size() < 2) continue;
    const StoryExample derived = derive_title_from_story(ex);
    std::vector<std::string> after = split_sentences(derived.title);
    for (const auto& s : split_sentences(derived.story)) after.push_back(s);
    CHECK(after == before);
  }
}

TEST_CASE("split_dataset matches the published 8:1:1 arithmetic") {
  SUBCASE("small round numbers") {
    auto corpus = testutil::toy_corpus(100, 1);
    DatasetSplit split = split_dataset(corpus, {8, 1, 1}, 7);
    CHECK(split.train.size() == 80);
    CHECK(split.valid.size() == 10);
    CHECK(split.test.size() == 10);
  }
  SUBCASE("ROCStories-sized partition") {
    // 98,161 records at 8:1:1 -> 78,529 / 9,816 / 9,816
    std::vector<StoryExample> corpus(98161);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      corpus[i].id = std::to_string(i);
      corpus[i].title = "t";
      corpus[i].story = "s.";
    }
    DatasetSplit split = split_dataset(corpus, {8, 1, 1}, 7);
    CHECK(split.train.size() == 78529);
    CHECK(split.valid.size() == 9816);
    CHECK(split.test.size() == 9816);
  }
}

TEST_CASE("split_dataset is a deterministic partition") {
  auto corpus = testutil::toy_corpus(53, 2);
  DatasetSplit a = split_dataset(corpus, {8, 1, 1}, 99);
  DatasetSplit b = split_dataset(corpus, {8, 1, 1}, 99);
  CHECK(a.train == b.train);
  CHECK(a.valid == b.valid);
  CHECK(a.test == b.test);

  std::set<std::string> seen;
  for (const auto* part : {&a.train, &a.valid, &a.test})
    for (const StoryExample& ex : *part) CHECK(seen.insert(ex.id).second);
  CHECK(seen.size() == corpus.size());

  DatasetSplit c = split_dataset(corpus, {8, 1, 1}, 100);
  CHECK(a.train != c.train);  // seed moves the shuffle

  DatasetSplit d = split_dataset(corpus, {8, 1, 1}, 0, /*shuffle=*/false);
  CHECK(d.train.front().id == corpus.front().id);  // contiguous mode

  std::vector<StoryExample> tiny(corpus.begin(), corpus.begin() + 2);
  CHECK_THROWS_AS(split_dataset(tiny, {8, 1, 1}, 1), Error);
}

// ---- textproc -----------------------------------------------------------

TEST_CASE("tokenizer lowercases and splits punctuation") {
  CHECK(tokenize("Martin writes a book") ==
        std::vector<std::string>{"martin", "writes", "a", "book"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("Hello, world!") ==
        std::vector<std::string>{"hello", ",", "world", "!"});
  CHECK(tokenize("  spaced\tout \n text ") ==
        std::vector<std::string>{"spaced", "out", "text"});
  CHECK(tokenize("don't") == std::vector<std::string>{"don", "'", "t"});
}

TEST_CASE("vocabulary ranks by frequency with lexicographic ties") {
  std::vector<StoryExample> corpus = {
      {"1", "the cat", "the cat sat. the end.", std::nullopt},
      {"2", "a dog", "a dog ran. the dog hid the bone.", std::nullopt},
  };
  Vocabulary v = Vocabulary::build(corpus, 50);
  CHECK(v.id_of("the") == Vocabulary::kNumSpecials);  // most frequent
  // "cat" and "dog": dog appears 3 times, cat 2 -> dog first
  CHECK(v.id_of("dog") < v.id_of("cat"));
  // equal-count pair breaks lexicographically
  CHECK(v.id_of("end") < v.id_of("hid"));
}

TEST_CASE("vocabulary cap maps the tail to UNK") {
  std::vector<StoryExample> corpus = {
      {"1", "alpha beta", "alpha alpha beta gamma delta epsilon.", std::nullopt},
  };
  Vocabulary v = Vocabulary::build(corpus, 2);
  CHECK(v.size() == 2 + Vocabulary::kNumSpecials);
  CHECK(v.id_of("alpha") != Vocabulary::kUnk);
  CHECK(v.id_of("epsilon") == Vocabulary::kUnk);
  CHECK_THROWS_AS(Vocabulary::build(corpus, 0), Error);
  CHECK_THROWS_AS(Vocabulary::build({}, 10), Error);
}

TEST_CASE("encode/decode round-trips in-vocabulary text") {
  auto corpus = testutil::toy_corpus(30, 3);
  Vocabulary v = Vocabulary::build(corpus, 1000);
  const std::string text = "anna wanted a kite . anna went to the park .";
  TokenSeq seq = encode(v, tokenize(text), Role::kStory);
  CHECK(decode(v, seq) == text);

  TokenSeq framed = encode(v, tokenize(text), Role::kStory, true);
  CHECK(framed.ids.front() == Vocabulary::kBos);
  CHECK(framed.ids.back() == Vocabulary::kEos);
  CHECK(decode(v, framed) == text);  // specials stripped

  TokenSeq oov = encode(v, {"anna", "zeppelin"}, Role::kTitle);
  CHECK(oov.ids[1] == Vocabulary::kUnk);
  CHECK(decode(v, oov) == "anna <unk>");

  TokenSeq bad{{99999}, Role::kTitle};
  CHECK_THROWS_AS(decode(v, bad), Error);
}

TEST_CASE("vocabulary persists one token per line") {
  auto corpus = testutil::toy_corpus(12, 4);
  Vocabulary v = Vocabulary::build(corpus, 100);
  const auto path = temp_file("lp_vocab.txt");
  v.save(path);
  Vocabulary loaded = Vocabulary::load(path);
  CHECK(loaded.size() == v.size());
  CHECK(loaded.id_of("anna") == v.id_of("anna"));
  std::filesystem::remove(path);
}

TEST_CASE("vocabulary build is reproducible") {
  auto corpus = testutil::toy_corpus(40, 6);
  Vocabulary a = Vocabulary::build(corpus, 200);
  Vocabulary b = Vocabulary::build(corpus, 200);
  for (std::size_t id = 0; id < a.size(); ++id)
    CHECK(a.token_of(static_cast<int>(id)) == b.token_of(static_cast<int>(id)));
}

// ---- sumbasic ------------------------------------------------------------

TEST_CASE("word probabilities are normalized content-word frequencies") {
  auto p = word_probabilities({"cat cat dog."});
  CHECK(p.at("cat") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p.at("dog") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  double total = 0;
  for (auto& [_, prob] : p) total += prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(word_probabilities({"the of and."}), Error);
}

TEST_CASE("extract_outline picks the best mean content probability") {
  // content words: ran fast | storm hit town hard | storm hit town hard
  // (again is a stopword) | hid; counts: storm/hit/town/hard twice each,
  // ran/fast/hid once; total 11. Means: s0 = 1/11, s1 = s2 = 2/11,
  // s3 = 1/11; tie between s1 and s2 goes to the earlier sentence.
  const std::vector<std::string> story = {
      "he ran fast.",
      "the storm hit the town hard.",
      "the storm hit the town hard again and again.",
      "he hid.",
  };
  OutlineExtraction out = extract_outline(story);
  CHECK(out.index == 1);
  CHECK(out.sentence == "the storm hit the town hard.");
  REQUIRE(out.scores.size() == 4);
  CHECK(out.scores[0].score == doctest::Approx(1.0 / 11).epsilon(1e-12));
  CHECK(out.scores[1].score == doctest::Approx(2.0 / 11).epsilon(1e-12));
  CHECK(out.scores[2].score == doctest::Approx(2.0 / 11).epsilon(1e-12));
  CHECK(out.scores[3].score == doctest::Approx(1.0 / 11).epsilon(1e-12));
}

TEST_CASE("single-sentence story extracts itself") {
  OutlineExtraction out = extract_outline({"a lone wolf howled."});
  CHECK(out.index == 0);
  CHECK(out.sentence == "a lone wolf howled.");
}

TEST_CASE("ties break toward the earlier sentence") {
  OutlineExtraction out = extract_outline({"a cat sat.", "a cat sat."});
  CHECK(out.index == 0);
}

TEST_CASE("extraction is deterministic and verbatim") {
  Rng rng(31);
  const std::vector<std::string> words = {"storm", "kite",  "river", "tower",
                                          "crowd", "baker", "night", "flame"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> story;
    const std::size_t n_sents = 2 + rng.below(4);
    for (std::size_t s = 0; s < n_sents; ++s) {
      std::string sent = "the";
      const std::size_t n_words = 1 + rng.below(4);
      for (std::size_t w = 0; w < n_words; ++w)
        sent += " " + words[rng.below(words.size())];
      story.push_back(sent + ".");
    }
    OutlineExtraction a = extract_outline(story);
    OutlineExtraction b = extract_outline(story);
    CHECK(a.index == b.index);
    CHECK(a.sentence == story[a.index]);  // verbatim
  }
}

TEST_CASE("duplicating the winner's words elsewhere never dethrones it") {
  // holds for sentences of distinct words: boosting the winner's words
  // lifts its own mean at least as much as any rival's
  Rng rng(77);
  std::vector<std::string> words = {"storm", "kite", "river", "tower",
                                    "crowd", "baker"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> story;
    const std::size_t n_sents = 2 + rng.below(3);
    for (std::size_t s = 0; s < n_sents; ++s) {
      rng.shuffle(words);
      std::string sent = "the";
      const std::size_t n_words = 1 + rng.below(3);
      for (std::size_t w = 0; w < n_words; ++w) sent += " " + words[w];
      story.push_back(sent + ".");
    }
    OutlineExtraction before = extract_outline(story);
    // append a sentence repeating the winner's content words
    std::vector<std::string> boosted = story;
    boosted.push_back(before.sentence);
    OutlineExtraction after = extract_outline(boosted);
    CHECK(after.sentence == before.sentence);
  }
}
