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

#ifndef EMOTRACK_ROLES_H_
#define EMOTRACK_ROLES_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emotrack/conllu.h"
#include "emotrack/corpus.h"
#include "emotrack/emotion.h"

namespace emotrack {

struct Argument {
  int token = 0;          // head token of the argument phrase
  std::string relation;   // relation to the predicate
  bool inherited = false; // supplied by the raising / conjunction rule
};

struct Predicate {
  int head = 0;
  std::vector<Argument> arguments;
};

// Predicates are VERB tokens, tokens governing a copula, and tokens with a
// subject dependent. Arguments are nsubj, nsubj:pass, csubj, obj, iobj,
// obl (with subtypes) and expl dependents, each extended to its "conj"
// siblings. A predicate attached by xcomp/ccomp/conj that lacks a subject
// inherits one from its governor (the governor's object for xcomp when
// present). Only tags and relations are consulted, never lemmas.
std::vector<Predicate> ExtractPredicates(const DepGraph &graph);

// Relation -> role table. Lookup tries the full label first, then the base
// relation; labels in neither position are never matched.
class PatternTable {
 public:
  // nsubj, obl:agent -> actor; obj, iobj, nsubj:pass, obl -> object.
  static PatternTable Default();
  // Text form: one "<relation> <actor|object>" pair per line, '#' comments.
  // Throws ParseError on malformed lines.
  static PatternTable Parse(const std::string &text, const std::string &origin);

  void Set(const std::string &relation, Role role) { table_[relation] = role; }
  std::optional<Role> Lookup(const std::string &relation) const;
  std::string ToText() const;
  const std::map<std::string, Role> &entries() const { return table_; }

 private:
  std::map<std::string, Role> table_;
};

struct RoleAssignment {
  std::string story_id;
  int line_index = 0;
  std::string character;
  Role role = Role::kActor;

  PairKey Key() const { return {story_id, line_index, character}; }
  friend bool operator==(const RoleAssignment &, const RoleAssignment &) = default;
};

// Roles for the roster characters in one sentence. Characters match
// argument phrases case-insensitively on surface forms, with a possessive
// "'s" stripped; multiword names match contiguous flat/compound spans.
// Actor wins when a character holds both roles. Sorted by character.
std::vector<RoleAssignment> AssignRolesInGraph(const DepGraph &graph,
                                               const std::string &story_id, int line,
                                               const std::vector<std::string> &roster,
                                               const PatternTable &patterns);

// Graphs are linked to stories through "<story>:<line>" sentence ids;
// graphs without one are skipped. Output sorted by (story, line, character).
std::vector<RoleAssignment> AssignRoles(
    const std::vector<DepGraph> &graphs,
    const std::map<std::string, std::vector<std::string>> &rosters,
    const PatternTable &patterns);

// Proper-noun argument heads (with flat/compound name parts), for stories
// without a character roster. Sorted, unique.
std::vector<std::string> DetectCharacters(const std::vector<const DepGraph *> &graphs);

struct RoleEvaluation {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // nothing predicted as actor
  bool recall_undefined = false;     // no gold actors
};

// Precision/recall/F1 of the actor class. Throws std::invalid_argument when
// both sides are non-empty but share no (story, line).
RoleEvaluation EvaluateRoles(const std::vector<RoleAssignment> &predicted,
                             const std::vector<RoleAssignment> &gold);

std::vector<Json> RolesToRecords(const std::vector<RoleAssignment> &roles);
std::vector<RoleAssignment> RolesFromRecords(const RecordFile &file,
                                             const std::string &origin);

}  // namespace emotrack

#endif  // EMOTRACK_ROLES_H_
