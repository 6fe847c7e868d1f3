// Copyright 2026 The emotrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include "doctest.h"
#include "emotrack/corpus.h"
#include "emotrack/errors.h"
#include "testing.h"

namespace emotrack {
namespace {

using testing::TempDir;

constexpr char kStories[] =
    "storyid,split,linenum,sentence,characters\n"
    "s1,dev,1,Tom ordered coffee.,Tom|Mary\n"
    "s1,dev,2,\"Mary brought it, smiling.\",Tom|Mary\n"
    "s2,test,2,They left.,\n"
    "s2,test,1,The friends met.,\n";

constexpr char kAnnotations[] =
    "storyid,linenum,char,workerid,plutchik\n"
    "s1,1,Tom,w1,\"[\"\"joy:3\"\",\"\"anticipation:1\"\"]\"\n"
    "s1,1,Tom,w2,\"[\"\"joy:2\"\"]\"\n"
    "s1,1,Tom,w3,\"[\"\"none\"\"]\"\n"
    "s1,1,Mary,w1,trust:2;joy:1\n"
    "s1,1,Mary,w2,trust:1\n"
    "s1,1,Mary,w3,none\n"
    "s1,2,Bob,w1,joy:3\n"
    "s9,1,Tom,w1,joy:3\n"
    "s2,1,Ann,w1,fear:3\n"
    "s2,1,Ann,w2,fear:3\n";

ImportConfig WriteRelease(const TempDir &dir, const std::string &stories = kStories,
                          const std::string &annotations = kAnnotations) {
  WriteFileOrThrow(dir.File("stories.csv"), stories);
  WriteFileOrThrow(dir.File("annotations.csv"), annotations);
  return ImportConfig::FromJson(
      {{"stories", {{"file", "stories.csv"}}}, {"annotations", {{"file", "annotations.csv"}}}},
      dir.path());
}

TEST_CASE("aggregation rules") {
  VoteCounts v{};
  v[Index(Emotion::kJoy)] = 2;
  v[Index(Emotion::kFear)] = 1;
  CHECK(Aggregate(v, 3, Aggregation::kMajority) == EmotionSet{Emotion::kJoy});
  CHECK(Aggregate(v, 4, Aggregation::kMajority) == EmotionSet{Emotion::kJoy});
  CHECK(Aggregate(v, 5, Aggregation::kMajority).Empty());
  CHECK(Aggregate(v, 3, Aggregation::kAny) == EmotionSet{Emotion::kJoy, Emotion::kFear});
  CHECK(Aggregate(v, 2, Aggregation::kAll) == EmotionSet{Emotion::kJoy});
  CHECK(Aggregate(VoteCounts{}, 0, Aggregation::kAll).Empty());
  CHECK(Aggregate(VoteCounts{}, 0, Aggregation::kMajority).Empty());
  CHECK(ParseAggregation("any") == Aggregation::kAny);
  CHECK_THROWS_AS(ParseAggregation("mean"), ConfigError);
}

TEST_CASE("import builds stories, rosters and majority gold") {
  TempDir dir;
  ImportResult r = ImportCorpus(WriteRelease(dir));
  const Corpus &c = r.corpus;
  REQUIRE(c.stories.size() == 2);
  CHECK(c.stories[0].story_id == "s1");
  CHECK(c.stories[0].split == "dev");
  CHECK(c.stories[0].lines[1].text == "Mary brought it, smiling.");
  CHECK(c.stories[0].characters == std::vector<std::string>{"Tom", "Mary"});
  // Lines given out of order are placed by number; the roster falls back
  // to the annotated characters.
  CHECK(c.stories[1].lines[0].text == "The friends met.");
  CHECK(c.stories[1].characters == std::vector<std::string>{"Ann"});

  // Bob is not on s1's roster; s9 does not exist.
  CHECK(r.rejected.size() == 2);

  auto gold = c.GoldIndex();
  const GoldAnnotation *tom = gold.at({"s1", 0, "Tom"});
  CHECK(tom->num_annotators == 3);
  CHECK(tom->votes[Index(Emotion::kJoy)] == 2);
  CHECK(tom->gold == EmotionSet{Emotion::kJoy});
  const GoldAnnotation *mary = gold.at({"s1", 0, "Mary"});
  CHECK(mary->gold == EmotionSet{Emotion::kTrust});
  CHECK(gold.at({"s2", 0, "Ann"})->gold == EmotionSet{Emotion::kFear});
  CHECK(ValidateCorpus(c).empty());
}

TEST_CASE("min_intensity drops weak votes") {
  TempDir dir;
  ImportConfig config = WriteRelease(dir);
  config.min_intensity = 2;
  Corpus c = ImportCorpus(config).corpus;
  const GoldAnnotation *mary = c.GoldIndex().at({"s1", 0, "Mary"});
  CHECK(mary->votes[Index(Emotion::kTrust)] == 1);
  CHECK(mary->gold.Empty());
}

TEST_CASE("import is deterministic") {
  TempDir dir;
  ImportConfig config = WriteRelease(dir);
  std::string a = SerializeRecords(Json(), CorpusToRecords(ImportCorpus(config).corpus));
  std::string b = SerializeRecords(Json(), CorpusToRecords(ImportCorpus(config).corpus));
  CHECK(a == b);
}

TEST_CASE("malformed releases fail with a locus") {
  TempDir dir;
  SUBCASE("unknown emotion") {
    try {
      ImportCorpus(WriteRelease(dir, kStories,
                                "storyid,linenum,char,workerid,plutchik\ns1,1,Tom,w1,pride:2\n"));
      FAIL("expected a parse error");
    } catch (const ParseError &e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("pride") != std::string::npos);
    }
  }
  SUBCASE("duplicate line") {
    CHECK_THROWS_AS(ImportCorpus(WriteRelease(
                        dir, "storyid,linenum,sentence\ns1,1,A.\ns1,1,B.\n", kAnnotations)),
                    ParseError);
  }
  SUBCASE("gap in line numbers") {
    CHECK_THROWS_AS(ImportCorpus(WriteRelease(
                        dir, "storyid,linenum,sentence\ns1,1,A.\ns1,3,B.\n", kAnnotations)),
                    ParseError);
  }
  SUBCASE("missing column") {
    CHECK_THROWS_AS(ImportCorpus(WriteRelease(dir, "storyid,sentence\ns1,A.\n", kAnnotations)),
                    ParseError);
  }
}

TEST_CASE("column mapping renames fields") {
  TempDir dir;
  WriteFileOrThrow(dir.File("st.csv"), "id,n,txt\nx,0,Ann ran.\n");
  WriteFileOrThrow(dir.File("an.csv"), "id,n,who,labels\nx,0,Ann,\"[\"\"fear\"\"]\"\n");
  ImportConfig config = ImportConfig::FromJson(
      {{"line_base", 0},
       {"aggregation", "any"},
       {"stories",
        {{"file", "st.csv"}, {"columns", {{"story_id", "id"}, {"line", "n"}, {"text", "txt"}}}}},
       {"annotations",
        {{"file", "an.csv"},
         {"columns",
          {{"story_id", "id"}, {"line", "n"}, {"character", "who"}, {"labels", "labels"}}}}}},
      dir.path());
  Corpus c = ImportCorpus(config).corpus;
  CHECK(c.annotations.at(0).gold == EmotionSet{Emotion::kFear});
  CHECK(c.aggregation == Aggregation::kAny);
  CHECK_THROWS_AS(ImportConfig::FromJson({{"stories", {{"columns", {{"bogus", "x"}}}}}}, ""),
                  ConfigError);
  CHECK_THROWS_AS(ImportConfig::FromJson({{"colour", 1}}, ""), ConfigError);
}

TEST_CASE("canonical records round trip") {
  TempDir dir;
  Corpus c = ImportCorpus(WriteRelease(dir)).corpus;
  c.stories[0].lines[1].resolved_text = "Mary brought coffee, smiling.";
  WriteCorpus(dir.File("corpus.jsonl"), c, {{"artifact", "corpus"}});
  Corpus back = ReadCorpus(dir.File("corpus.jsonl"));
  CHECK(back == c);
  std::string first = ReadFileOrThrow(dir.File("corpus.jsonl"));
  WriteCorpus(dir.File("again.jsonl"), back, {{"artifact", "corpus"}});
  CHECK(ReadFileOrThrow(dir.File("again.jsonl")) == first);
}

TEST_CASE("validation names each broken invariant") {
  TempDir dir;
  Corpus c = ImportCorpus(WriteRelease(dir)).corpus;
  c.annotations[0].gold.Insert(Emotion::kDisgust);
  c.annotations[1].foreign_labels.push_back("love");
  c.stories[1].characters.push_back("Ann");
  c.annotations.push_back(c.annotations[2]);
  c.annotations.back().character = "Zed";
  auto v = ValidateCorpus(c);
  auto has = [&](const std::string &needle) {
    for (const Violation &x : v) {
      if (x.message.find(needle) != std::string::npos) return true;
    }
    return false;
  };
  CHECK(has("does not follow from the votes"));
  CHECK(has("not a Plutchik basic emotion"));
  CHECK(has("duplicate character name"));
  CHECK(has("unknown character"));
}

}  // namespace
}  // namespace emotrack
