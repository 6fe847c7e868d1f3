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
#include "emotrack/conllu.h"
#include "emotrack/errors.h"
#include "emotrack/roles.h"
#include "testing.h"

namespace emotrack {
namespace {

std::string Row(int id, const char *form, const char *upos, int head, const char *rel) {
  return std::to_string(id) + "\t" + form + "\t_\t" + upos + "\t_\t_\t" +
         std::to_string(head) + "\t" + rel + "\t_\t_\n";
}

TEST_CASE("conllu reader") {
  std::string text = "# sent_id = s:0\n# text = Tom left.\n" + Row(1, "Tom", "PROPN", 2, "nsubj") +
                     "1-2\tTomleft\t_\t_\t_\t_\t_\t_\t_\t_\n" + Row(2, "left", "VERB", 0, "root") +
                     "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n" + Row(3, ".", "PUNCT", 2, "punct") +
                     "\n";
  std::vector<DepGraph> g = ParseConllu(text, "t");
  REQUIRE(g.size() == 1);
  CHECK(g[0].tokens.size() == 3);
  CHECK(g[0].text == "Tom left.");
  CHECK(g[0].StoryLine() == std::make_pair(std::string("s"), 0));
  CHECK(g[0].Token(1).lemma.empty());
  CHECK(g[0].Dependents(2) == std::vector<int>{1, 3});
  CHECK(ValidateGraph(g[0]).empty());
  CHECK(ParseConllu(WriteConllu(g), "t")[0].tokens.size() == 3);
  CHECK(BaseRelation("nsubj:pass") == "nsubj");

  try {
    ParseConllu("# c\n1\tTom\t_\tPROPN\n", "bad.conllu");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(ParseConllu(Row(1, "a", "X", 0, "root").replace(0, 1, "x"), "t"), ParseError);
}

TEST_CASE("graph validation") {
  auto one = [](const std::string &rows) { return ParseConllu(rows + "\n", "t").at(0); };
  CHECK_FALSE(ValidateGraph(one(Row(1, "a", "X", 2, "dep") + Row(2, "b", "X", 1, "dep"))).empty());
  CHECK_FALSE(ValidateGraph(one(Row(1, "a", "X", 0, "root") + Row(2, "b", "X", 0, "root"))).empty());
  CHECK_FALSE(ValidateGraph(one(Row(1, "a", "X", 0, "root") + Row(2, "b", "X", 7, "dep"))).empty());
}

TEST_CASE("pattern table") {
  PatternTable t = PatternTable::Default();
  CHECK(t.Lookup("nsubj") == Role::kActor);
  CHECK(t.Lookup("obl:agent") == Role::kActor);
  CHECK(t.Lookup("nsubj:pass") == Role::kObject);
  CHECK(t.Lookup("obl:tmod") == Role::kObject);  // base relation fallback
  CHECK(t.Lookup("iobj") == Role::kObject);
  CHECK_FALSE(t.Lookup("expl").has_value());
  CHECK_FALSE(t.Lookup("nmod:poss").has_value());

  PatternTable p = PatternTable::Parse("# custom\nnsubj actor\n\ncsubj  actor # clause\n", "p");
  CHECK(p.Lookup("csubj") == Role::kActor);
  CHECK_FALSE(p.Lookup("obj").has_value());
  CHECK(PatternTable::Parse(t.ToText(), "rt").entries() == t.entries());
  CHECK_THROWS_AS(PatternTable::Parse("nsubj hero\n", "p"), ParseError);
  CHECK_THROWS_AS(PatternTable::Parse("nsubj\n", "p"), ParseError);
}

TEST_CASE("predicates and inherited subjects") {
  testing::Conformance c = testing::LoadConformance(EMOTRACK_TEST_DATA);
  // "Tom wanted to visit Mary." -> visit inherits Tom.
  std::vector<Predicate> preds = ExtractPredicates(c.graphs[7]);
  REQUIRE(preds.size() == 2);
  const Predicate &visit = preds[1];
  CHECK(visit.head == 4);
  bool inherited_tom = false;
  for (const Argument &a : visit.arguments) {
    if (a.token == 1) inherited_tom = a.inherited && a.relation == "nsubj";
  }
  CHECK(inherited_tom);
  // "Tom is happy." -> the copular head is the predicate.
  preds = ExtractPredicates(c.graphs[9]);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].head == 3);
}

TEST_CASE("conformance corpus matches the hand labels") {
  testing::Conformance c = testing::LoadConformance(EMOTRACK_TEST_DATA);
  std::vector<RoleAssignment> roles = AssignRoles(c.graphs, c.rosters, PatternTable::Default());
  std::map<std::pair<std::string, std::string>, std::string> got;
  for (const RoleAssignment &r : roles) {
    got[{r.story_id, r.character}] = std::string(RoleName(r.role));
  }
  CHECK(c.graphs.size() == 20);
  for (const auto &[key, label] : c.labels) {
    auto it = got.find(key);
    std::string predicted = it == got.end() ? "absent" : it->second;
    INFO(key.first << " " << key.second);
    CHECK(predicted == label);
  }
  for (const auto &[key, role] : got) CHECK(c.labels.count(key) == 1);
}

TEST_CASE("character detection without a roster") {
  testing::Conformance c = testing::LoadConformance(EMOTRACK_TEST_DATA);
  std::vector<const DepGraph *> ptrs = {&c.graphs[5], &c.graphs[15], &c.graphs[14]};
  CHECK(DetectCharacters(ptrs) == std::vector<std::string>{"Ann", "Mary", "Mary Smith", "Tom"});
}

TEST_CASE("role evaluation") {
  std::vector<RoleAssignment> gold = {{"s", 0, "A", Role::kActor},
                                      {"s", 0, "B", Role::kObject},
                                      {"s", 1, "A", Role::kActor}};
  std::vector<RoleAssignment> pred = {{"s", 0, "A", Role::kActor},
                                      {"s", 0, "B", Role::kActor}};
  RoleEvaluation e = EvaluateRoles(pred, gold);
  CHECK(e.true_positives == 1);
  CHECK(e.false_positives == 1);
  CHECK(e.false_negatives == 1);
  CHECK(e.f1 == doctest::Approx(0.5));
  RoleEvaluation none = EvaluateRoles({}, gold);
  CHECK(none.precision_undefined);
  CHECK_THROWS_AS(EvaluateRoles({{"t", 0, "A", Role::kActor}}, gold), std::invalid_argument);

  RecordFile f = ParseRecordText(SerializeRecords(Json(), RolesToRecords(gold)), "r");
  CHECK(RolesFromRecords(f, "r") == gold);
}

}  // namespace
}  // namespace emotrack
