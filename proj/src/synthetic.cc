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

#include "emotrack/synthetic.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "emotrack/records.h"
#include "emotrack/text.h"

namespace emotrack {

namespace {

const std::vector<std::string> kMale = {"Tom", "Jack", "Sam", "Ben", "Max",
                                        "Leo", "Dan", "Eli", "Joe", "Ray"};
const std::vector<std::string> kFemale = {"Mary", "Anna", "Kate", "Lucy", "Emma",
                                          "Ruth", "Jane", "Nina", "Rosa", "Tess"};
const std::vector<std::string> kThingVerbs = {"bought", "found",  "lost",  "painted", "fixed",
                                              "opened", "cleaned", "baked", "sold",   "dropped"};
const std::vector<std::string> kPersonVerbs = {"called", "helped", "visited", "hugged", "praised",
                                               "thanked", "warned", "met",    "teased", "greeted"};
const std::vector<std::string> kAdjectives = {"red",   "old",   "new",  "small", "big",  "shiny",
                                              "cheap", "heavy", "tiny", "green", "blue", "warm"};
const std::vector<std::string> kNouns = {"cup",  "book",  "cake", "car", "ticket", "letter",
                                         "kite", "lamp",  "bike", "chair", "hat",  "clock"};

struct Tok {
  std::string form;
  std::string upos;
  int head;
  std::string deprel;
};

enum class Gen { kMale, kFemale, kPlural };

struct Character {
  std::string name;
  Gen gen;
};

std::string SubjectPronoun(Gen g) {
  return g == Gen::kMale ? "He" : g == Gen::kFemale ? "She" : "They";
}
std::string ObjectPronoun(Gen g) { return g == Gen::kMale ? "him" : "her"; }
std::string PossessivePronoun(Gen g) { return g == Gen::kMale ? "his" : "her"; }

// Joins forms: no space before punctuation or a possessive clitic.
std::string Surface(const std::vector<std::string> &forms) {
  std::string out;
  for (const std::string &f : forms) {
    if (!out.empty() && f != "." && f != "'s") out += ' ';
    out += f;
  }
  return out;
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  size_t Pick(size_t n) { return static_cast<size_t>(engine_() % n); }
  bool Chance(int percent) { return static_cast<int>(engine_() % 100) < percent; }
  template <typename T>
  const T &Choose(const std::vector<T> &v) { return v[Pick(v.size())]; }

 private:
  std::mt19937_64 engine_;
};

struct Sentence {
  std::vector<Tok> toks;
  std::vector<std::string> original;  // forms as they appear in the story
  std::vector<std::pair<std::string, Role>> roles;
};

}  // namespace

SyntheticRelease GenerateSyntheticRelease(const SyntheticOptions &options) {
  if (options.stories < 1 || options.lines < 1 || options.annotators < 1) {
    throw std::invalid_argument("synthetic release needs stories, lines and annotators");
  }
  Rng rng(options.seed);
  SyntheticRelease rel;
  std::set<std::string> used_texts;
  std::string stories_csv = "storyid,split,linenum,sentence,characters\n";
  std::string annotations_csv = "storyid,linenum,char,workerid,plutchik\n";
  std::vector<Json> entity_records;

  for (int s = 0; s < options.stories; ++s) {
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "syn-%04d", s + 1);
    const std::string story_id = idbuf;
    const std::string split = s % 5 == 4 ? "test" : "dev";

    std::vector<Character> cast = {{rng.Choose(kMale), Gen::kMale},
                                   {rng.Choose(kFemale), Gen::kFemale}};
    if (rng.Chance(34)) cast.push_back({"People", Gen::kPlural});
    std::string roster;
    for (const Character &c : cast) {
      if (!roster.empty()) roster += '|';
      roster += c.name;
      Json e = {{"kind", "entity"}, {"story_id", story_id}, {"character", c.name}};
      if (c.gen == Gen::kMale) e["gender"] = "m";
      if (c.gen == Gen::kFemale) e["gender"] = "f";
      e["number"] = c.gen == Gen::kPlural ? "pl" : "sg";
      entity_records.push_back(std::move(e));
    }

    std::set<std::string> mentioned;
    std::vector<std::string> resolved_lines;
    for (int t = 0; t < options.lines; ++t) {
      Sentence sent;
      std::string text, resolved;
      std::set<std::string> newly_mentioned;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 1000) throw std::runtime_error("synthetic generator ran out of sentences");
        sent = Sentence();
        newly_mentioned.clear();
        const Character &a = cast[rng.Pick(cast.size())];
        const Character *b = &cast[rng.Pick(cast.size())];
        while (b == &a) b = &cast[rng.Pick(cast.size())];
        const std::string adj = rng.Choose(kAdjectives);
        const std::string noun = rng.Choose(kNouns);
        // A pronoun may stand for a character already mentioned; each story
        // has one character per pronoun class, so resolution is unambiguous.
        auto subject = [&](const Character &c) {
          bool pron = mentioned.count(c.name) && rng.Chance(40);
          return pron ? SubjectPronoun(c.gen) : c.name;
        };
        int kind = static_cast<int>(rng.Pick(5));
        if (kind == 4 && a.gen == Gen::kPlural) kind = 0;
        switch (kind) {
          case 0: {  // A verbed the ADJ NOUN.
            std::string v = rng.Choose(kThingVerbs);
            sent.toks = {{a.name, "PROPN", 2, "nsubj"}, {v, "VERB", 0, "root"},
                         {"the", "DET", 5, "det"},     {adj, "ADJ", 5, "amod"},
                         {noun, "NOUN", 2, "obj"},     {".", "PUNCT", 2, "punct"}};
            sent.original = {subject(a), v, "the", adj, noun, "."};
            sent.roles = {{a.name, Role::kActor}};
            break;
          }
          case 1: {  // A verbed B with the ADJ NOUN.
            std::string v = rng.Choose(kPersonVerbs);
            sent.toks = {{a.name, "PROPN", 2, "nsubj"}, {v, "VERB", 0, "root"},
                         {b->name, "PROPN", 2, "obj"},  {"with", "ADP", 7, "case"},
                         {"the", "DET", 7, "det"},      {adj, "ADJ", 7, "amod"},
                         {noun, "NOUN", 2, "obl"},      {".", "PUNCT", 2, "punct"}};
            std::string obj = b->name;
            if (mentioned.count(b->name) && b->gen != Gen::kPlural && b->gen != a.gen &&
                rng.Chance(40)) {
              obj = ObjectPronoun(b->gen);
            }
            sent.original = {subject(a), v, obj, "with", "the", adj, noun, "."};
            sent.roles = {{a.name, Role::kActor}, {b->name, Role::kObject}};
            break;
          }
          case 2: {  // B was verbed by A near the ADJ NOUN.
            std::string v = rng.Choose(kPersonVerbs);
            sent.toks = {{b->name, "PROPN", 3, "nsubj:pass"}, {"was", "AUX", 3, "aux:pass"},
                         {v, "VERB", 0, "root"},              {"by", "ADP", 5, "case"},
                         {a.name, "PROPN", 3, "obl:agent"},   {"near", "ADP", 9, "case"},
                         {"the", "DET", 9, "det"},            {adj, "ADJ", 9, "amod"},
                         {noun, "NOUN", 3, "obl"},            {".", "PUNCT", 3, "punct"}};
            if (b->gen == Gen::kPlural) sent.toks[1].form = "were";
            sent.original = {b->name, sent.toks[1].form, v, "by", a.name, "near", "the", adj,
                             noun, "."};
            sent.roles = {{b->name, Role::kObject}, {a.name, Role::kActor}};
            break;
          }
          case 3: {  // A and B verbed the ADJ NOUN.
            std::string v = rng.Choose(kThingVerbs);
            sent.toks = {{a.name, "PROPN", 4, "nsubj"}, {"and", "CCONJ", 3, "cc"},
                         {b->name, "PROPN", 1, "conj"}, {v, "VERB", 0, "root"},
                         {"the", "DET", 7, "det"},      {adj, "ADJ", 7, "amod"},
                         {noun, "NOUN", 4, "obj"},      {".", "PUNCT", 4, "punct"}};
            sent.original = {a.name, "and", b->name, v, "the", adj, noun, "."};
            sent.roles = {{a.name, Role::kActor}, {b->name, Role::kActor}};
            break;
          }
          default: {  // A verbed his/her ADJ NOUN.
            std::string v = rng.Choose(kThingVerbs);
            sent.toks = {{a.name, "PROPN", 2, "nsubj"}, {v, "VERB", 0, "root"},
                         {a.name, "PROPN", 6, "nmod:poss"}, {"'s", "PART", 3, "case"},
                         {adj, "ADJ", 6, "amod"},       {noun, "NOUN", 2, "obj"},
                         {".", "PUNCT", 2, "punct"}};
            std::string subj = subject(a);
            sent.original = {subj, v, PossessivePronoun(a.gen), adj, noun, "."};
            sent.roles = {{a.name, Role::kActor}};
            break;
          }
        }
        std::vector<std::string> forms;
        for (const Tok &tok : sent.toks) forms.push_back(tok.form);
        resolved = Surface(forms);
        text = Surface(sent.original);
        if (used_texts.count(text) || used_texts.count(resolved)) continue;
        for (const auto &[name, role] : sent.roles) newly_mentioned.insert(name);
        break;
      }
      used_texts.insert(text);
      used_texts.insert(resolved);
      mentioned.insert(newly_mentioned.begin(), newly_mentioned.end());
      resolved_lines.push_back(resolved);

      stories_csv += story_id + "," + split + "," + std::to_string(t + 1) + "," +
                     CsvField(text) + "," + CsvField(roster) + "\n";

      DepGraph g;
      g.sent_id = story_id + ":" + std::to_string(t);
      g.text = resolved;
      g.comments = {"sent_id = " + g.sent_id, "text = " + resolved};
      for (size_t i = 0; i < sent.toks.size(); ++i) {
        const Tok &tok = sent.toks[i];
        DepToken d;
        d.id = static_cast<int>(i) + 1;
        d.form = tok.form;
        d.lemma = tok.form;
        if (tok.upos != "PROPN") d.lemma = ToLower(d.lemma);
        d.upos = tok.upos;
        d.head = tok.head;
        d.deprel = tok.deprel;
        g.tokens.push_back(std::move(d));
      }
      rel.parses.push_back(std::move(g));

      // Gold labels for every roster character, including those absent
      // from the line.
      std::map<std::string, Role> line_roles;
      for (const auto &[name, role] : sent.roles) {
        auto [it, inserted] = line_roles.emplace(name, role);
        if (!inserted && role == Role::kActor) it->second = Role::kActor;
      }
      for (const auto &[name, role] : line_roles) {
        rel.roles.push_back({story_id, t, name, role});
      }
      std::vector<std::string> names;
      for (const Character &c : cast) names.push_back(c.name);
      std::sort(names.begin(), names.end());
      // Characters sharing a role in a line share its gold set: the event
      // text alone cannot tell co-actors apart.
      std::map<Role, EmotionSet> side_gold;
      auto draw = [&] {
        EmotionSet gold;
        if (!rng.Chance(12)) {
          for (Emotion e : kAllEmotions) {
            if (rng.Chance(22)) gold.Insert(e);
          }
        }
        return gold;
      };
      for (const std::string &name : names) {
        EmotionSet gold;
        auto role = line_roles.find(name);
        if (role == line_roles.end()) {
          gold = draw();
        } else {
          auto [it, inserted] = side_gold.emplace(role->second, EmotionSet());
          if (inserted) it->second = draw();
          gold = it->second;
        }
        std::vector<std::vector<std::string>> labels(options.annotators);
        for (Emotion e : kAllEmotions) {
          int k = options.annotators;
          int majority = (k + 1) / 2;
          int votes = gold.Contains(e) ? majority + static_cast<int>(rng.Pick(k - majority + 1))
                                       : static_cast<int>(rng.Pick(majority));
          std::vector<int> who(k);
          for (int i = 0; i < k; ++i) who[i] = i;
          for (int i = 0; i < votes; ++i) {
            std::swap(who[i], who[i + rng.Pick(k - i)]);
            labels[who[i]].push_back(std::string(EmotionName(e)) + ":" +
                                     std::to_string(1 + rng.Pick(3)));
          }
        }
        for (int w = 0; w < options.annotators; ++w) {
          Json list = Json::array();
          for (const std::string &l : labels[w]) list.push_back(l);
          if (list.empty()) list.push_back("none");
          annotations_csv += story_id + "," + std::to_string(t + 1) + "," + CsvField(name) +
                             ",w" + std::to_string(w + 1) + "," + CsvField(list.dump()) + "\n";
        }
      }
    }
    rel.resolved.push_back(std::move(resolved_lines));
  }
  std::sort(rel.roles.begin(), rel.roles.end(),
            [](const RoleAssignment &a, const RoleAssignment &b) { return a.Key() < b.Key(); });

  rel.stories_csv = std::move(stories_csv);
  rel.annotations_csv = std::move(annotations_csv);
  rel.entities = SerializeRecords(Json(), entity_records);
  rel.importer_config = {
      {"aggregation", "majority"},
      {"line_base", 1},
      {"min_intensity", 1},
      {"stories", {{"file", "stories.csv"}}},
      {"annotations", {{"file", "annotations.csv"}}},
  };
  return rel;
}

void WriteSyntheticRelease(const SyntheticRelease &release, const std::string &dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  WriteFileOrThrow((d / "stories.csv").string(), release.stories_csv);
  WriteFileOrThrow((d / "annotations.csv").string(), release.annotations_csv);
  WriteFileOrThrow((d / "entities.jsonl").string(), release.entities);
  WriteFileOrThrow((d / "parses.conllu").string(), WriteConllu(release.parses));
  WriteFileOrThrow((d / "importer.json").string(), release.importer_config.dump(2) + "\n");
}

}  // namespace emotrack
