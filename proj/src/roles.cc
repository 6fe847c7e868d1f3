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

#include "emotrack/roles.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "emotrack/errors.h"
#include "emotrack/text.h"

namespace emotrack {

namespace {

const std::set<std::string> kArgumentBases = {"nsubj", "csubj", "obj", "iobj", "obl", "expl"};
const std::set<std::string> kNonPredicateVerbRels = {"amod", "compound", "fixed", "flat",
                                                      "aux",  "cop",      "case",  "mark",
                                                      "det"};

bool IsSubject(const std::string &relation) {
  std::string base = BaseRelation(relation);
  return base == "nsubj" || base == "csubj";
}

bool IsPredicateToken(const DepGraph &g, const DepToken &t) {
  if (t.upos == "VERB" && !kNonPredicateVerbRels.count(BaseRelation(t.deprel))) return true;
  for (int d : g.Dependents(t.id)) {
    const DepToken &dep = g.Token(d);
    if (dep.deprel == "cop" || IsSubject(dep.deprel)) return true;
  }
  return false;
}

void AddWithConjuncts(const DepGraph &g, int token, const std::string &relation,
                      bool inherited, std::vector<Argument> *args) {
  args->push_back({token, relation, inherited});
  for (int c : g.Dependents(token, "conj")) {
    if (IsPredicateToken(g, g.Token(c))) continue;
    AddWithConjuncts(g, c, relation, inherited, args);
  }
}

}  // namespace

std::vector<Predicate> ExtractPredicates(const DepGraph &graph) {
  const int n = static_cast<int>(graph.tokens.size());
  std::vector<bool> is_pred(n + 1, false);
  for (const DepToken &t : graph.tokens) is_pred[t.id] = IsPredicateToken(graph, t);

  std::vector<std::optional<std::vector<Argument>>> memo(n + 1);
  std::vector<bool> visiting(n + 1, false);

  std::function<const std::vector<Argument> &(int)> arguments = [&](int p) -> const std::vector<Argument> & {
    if (memo[p]) return *memo[p];
    std::vector<Argument> args;
    if (visiting[p]) {  // cyclic input: no inheritance
      memo[p] = args;
      return *memo[p];
    }
    visiting[p] = true;
    for (int d : graph.Dependents(p)) {
      const DepToken &dep = graph.Token(d);
      if (kArgumentBases.count(BaseRelation(dep.deprel))) {
        AddWithConjuncts(graph, d, dep.deprel, false, &args);
      }
    }
    bool has_subject = std::any_of(args.begin(), args.end(),
                                   [](const Argument &a) { return IsSubject(a.relation); });
    const DepToken &self = graph.Token(p);
    int gov = self.head;
    std::string attach = BaseRelation(self.deprel);
    if (!has_subject && gov > 0 && gov <= n && is_pred[gov] &&
        (attach == "xcomp" || attach == "ccomp" || attach == "conj")) {
      const std::vector<Argument> &gov_args = arguments(gov);
      std::vector<Argument> controllers;
      if (attach == "xcomp") {
        for (const Argument &a : gov_args) {
          if (BaseRelation(a.relation) == "obj") controllers.push_back(a);
        }
      }
      if (controllers.empty()) {
        for (const Argument &a : gov_args) {
          if (IsSubject(a.relation)) controllers.push_back(a);
        }
      }
      for (const Argument &a : controllers) {
        args.push_back({a.token, attach == "conj" ? a.relation : "nsubj", true});
      }
    }
    visiting[p] = false;
    memo[p] = std::move(args);
    return *memo[p];
  };

  std::vector<Predicate> out;
  for (const DepToken &t : graph.tokens) {
    if (!is_pred[t.id]) continue;
    out.push_back({t.id, arguments(t.id)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pattern table.

PatternTable PatternTable::Default() {
  PatternTable t;
  t.Set("nsubj", Role::kActor);
  t.Set("obl:agent", Role::kActor);
  t.Set("obj", Role::kObject);
  t.Set("iobj", Role::kObject);
  t.Set("nsubj:pass", Role::kObject);
  t.Set("obl", Role::kObject);
  return t;
}

PatternTable PatternTable::Parse(const std::string &text, const std::string &origin) {
  PatternTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string relation, role, extra;
    if (!(fields >> relation)) continue;
    if (!(fields >> role) || (fields >> extra)) {
      throw ParseError(origin, lineno, "expected '<relation> <actor|object>'");
    }
    auto r = ParseRole(role);
    if (!r) throw ParseError(origin, lineno, "unknown role '" + role + "'");
    t.Set(relation, *r);
  }
  return t;
}

std::optional<Role> PatternTable::Lookup(const std::string &relation) const {
  auto it = table_.find(relation);
  if (it != table_.end()) return it->second;
  it = table_.find(BaseRelation(relation));
  if (it != table_.end()) return it->second;
  return std::nullopt;
}

std::string PatternTable::ToText() const {
  std::string out;
  for (const auto &[relation, role] : table_) {
    out += relation + " " + std::string(RoleName(role)) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Character matching.

namespace {

std::string NormalizeWord(std::string_view form) {
  std::string w = ToLower(form);
  if (w.size() > 2 && (w.compare(w.size() - 2, 2, "'s") == 0)) w.resize(w.size() - 2);
  if (w.size() > 4 && w.compare(w.size() - 4, 4, "\xe2\x80\x99s") == 0) w.resize(w.size() - 4);
  return w;
}

std::vector<std::string> NameWords(const std::string &name) {
  std::vector<std::string> words;
  std::istringstream in(name);
  std::string w;
  while (in >> w) words.push_back(NormalizeWord(w));
  return words;
}

bool IsNamePart(const std::string &deprel) {
  std::string base = BaseRelation(deprel);
  return base == "flat" || base == "compound";
}

// Token ids of the contiguous name span around `head`.
std::vector<int> NameSpan(const DepGraph &g, int head) {
  std::set<int> ids = {head};
  std::vector<int> stack = {head};
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    for (int d : g.Dependents(t)) {
      if (IsNamePart(g.Token(d).deprel) && ids.insert(d).second) stack.push_back(d);
    }
  }
  int lo = head;
  int hi = head;
  while (ids.count(lo - 1)) --lo;
  while (ids.count(hi + 1)) ++hi;
  std::vector<int> span;
  for (int i = lo; i <= hi; ++i) span.push_back(i);
  return span;
}

// Roster characters whose names match a window of the span containing the
// head. Only the longest matches are returned.
std::vector<std::string> MatchCharacters(const DepGraph &g, int head,
                                         const std::vector<std::string> &roster) {
  std::vector<int> span = NameSpan(g, head);
  std::vector<std::string> words;
  for (int id : span) words.push_back(NormalizeWord(g.Token(id).form));
  const int head_pos = head - span.front();

  std::vector<std::string> best;
  size_t best_len = 0;
  for (const std::string &c : roster) {
    std::vector<std::string> name = NameWords(c);
    if (name.empty() || name.size() > words.size()) continue;
    bool found = false;
    for (size_t start = 0; start + name.size() <= words.size() && !found; ++start) {
      if (head_pos < static_cast<int>(start) ||
          head_pos >= static_cast<int>(start + name.size())) {
        continue;
      }
      found = std::equal(name.begin(), name.end(), words.begin() + start);
    }
    if (!found) continue;
    if (name.size() > best_len) {
      best.clear();
      best_len = name.size();
    }
    if (name.size() == best_len) best.push_back(c);
  }
  return best;
}

}  // namespace

std::vector<RoleAssignment> AssignRolesInGraph(const DepGraph &graph,
                                               const std::string &story_id, int line,
                                               const std::vector<std::string> &roster,
                                               const PatternTable &patterns) {
  std::map<std::string, Role> roles;
  for (const Predicate &p : ExtractPredicates(graph)) {
    for (const Argument &a : p.arguments) {
      auto role = patterns.Lookup(a.relation);
      if (!role) continue;
      for (const std::string &c : MatchCharacters(graph, a.token, roster)) {
        auto [it, inserted] = roles.emplace(c, *role);
        if (!inserted && *role == Role::kActor) it->second = Role::kActor;
      }
    }
  }
  std::vector<RoleAssignment> out;
  for (const auto &[character, role] : roles) out.push_back({story_id, line, character, role});
  return out;
}

std::vector<RoleAssignment> AssignRoles(
    const std::vector<DepGraph> &graphs,
    const std::map<std::string, std::vector<std::string>> &rosters,
    const PatternTable &patterns) {
  std::vector<RoleAssignment> out;
  static const std::vector<std::string> kEmpty;
  for (const DepGraph &g : graphs) {
    auto id = g.StoryLine();
    if (!id) continue;
    auto it = rosters.find(id->first);
    const std::vector<std::string> &roster = it == rosters.end() ? kEmpty : it->second;
    std::vector<RoleAssignment> part = AssignRolesInGraph(g, id->first, id->second, roster, patterns);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end(), [](const RoleAssignment &a, const RoleAssignment &b) {
    return a.Key() < b.Key();
  });
  // A sentence id repeated in the input: keep one record, actor first.
  std::vector<RoleAssignment> unique;
  for (const RoleAssignment &r : out) {
    if (!unique.empty() && unique.back().Key() == r.Key()) {
      if (r.role == Role::kActor) unique.back().role = Role::kActor;
      continue;
    }
    unique.push_back(r);
  }
  return unique;
}

std::vector<std::string> DetectCharacters(const std::vector<const DepGraph *> &graphs) {
  std::set<std::string> names;
  for (const DepGraph *g : graphs) {
    for (const Predicate &p : ExtractPredicates(*g)) {
      for (const Argument &a : p.arguments) {
        if (g->Token(a.token).upos != "PROPN" || BaseRelation(a.relation) == "expl") continue;
        std::string name;
        for (int id : NameSpan(*g, a.token)) {
          std::string form = g->Token(id).form;
          if (form.size() > 2 && form.compare(form.size() - 2, 2, "'s") == 0) {
            form.resize(form.size() - 2);
          }
          if (!name.empty()) name += ' ';
          name += form;
        }
        names.insert(name);
      }
    }
  }
  return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// Evaluation.

RoleEvaluation EvaluateRoles(const std::vector<RoleAssignment> &predicted,
                             const std::vector<RoleAssignment> &gold) {
  std::set<std::pair<std::string, int>> pred_lines, gold_lines;
  for (const RoleAssignment &r : predicted) pred_lines.insert({r.story_id, r.line_index});
  for (const RoleAssignment &r : gold) gold_lines.insert({r.story_id, r.line_index});
  if (!pred_lines.empty() && !gold_lines.empty()) {
    bool overlap = std::any_of(pred_lines.begin(), pred_lines.end(),
                               [&](const auto &k) { return gold_lines.count(k) > 0; });
    if (!overlap) throw std::invalid_argument("predicted and gold roles share no events");
  }

  std::set<PairKey> pred_actor, gold_actor;
  for (const RoleAssignment &r : predicted) {
    if (r.role == Role::kActor) pred_actor.insert(r.Key());
  }
  for (const RoleAssignment &r : gold) {
    if (r.role == Role::kActor) gold_actor.insert(r.Key());
  }
  RoleEvaluation ev;
  for (const PairKey &k : pred_actor) {
    if (gold_actor.count(k)) {
      ++ev.true_positives;
    } else {
      ++ev.false_positives;
    }
  }
  for (const PairKey &k : gold_actor) {
    if (!pred_actor.count(k)) ++ev.false_negatives;
  }
  const int pred = ev.true_positives + ev.false_positives;
  const int real = ev.true_positives + ev.false_negatives;
  ev.precision_undefined = pred == 0;
  ev.recall_undefined = real == 0;
  ev.precision = pred == 0 ? 0.0 : static_cast<double>(ev.true_positives) / pred;
  ev.recall = real == 0 ? 0.0 : static_cast<double>(ev.true_positives) / real;
  ev.f1 = ev.precision + ev.recall == 0.0
              ? 0.0
              : 2.0 * ev.precision * ev.recall / (ev.precision + ev.recall);
  return ev;
}

std::vector<Json> RolesToRecords(const std::vector<RoleAssignment> &roles) {
  std::vector<Json> out;
  for (const RoleAssignment &r : roles) {
    out.push_back({{"kind", "role"},
                   {"story_id", r.story_id},
                   {"line_index", r.line_index},
                   {"character", r.character},
                   {"role", std::string(RoleName(r.role))}});
  }
  return out;
}

std::vector<RoleAssignment> RolesFromRecords(const RecordFile &file,
                                             const std::string &origin) {
  std::vector<RoleAssignment> out;
  for (const Json &r : file.records) {
    int lineno = r.value("_line", 0);
    try {
      if (r.at("kind") != "role") throw ParseError(origin, lineno, "expected role record");
      auto role = ParseRole(r.at("role").get<std::string>());
      if (!role) throw ParseError(origin, lineno, "unknown role");
      out.push_back({r.at("story_id").get<std::string>(), r.at("line_index").get<int>(),
                     r.at("character").get<std::string>(), *role});
    } catch (const Json::exception &e) {
      throw ParseError(origin, lineno, std::string("bad role record: ") + e.what());
    }
  }
  return out;
}

}  // namespace emotrack
