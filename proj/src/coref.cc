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

#include "emotrack/coref.h"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "emotrack/errors.h"
#include "emotrack/text.h"

namespace emotrack {

// ---------------------------------------------------------------------------
// Entity features.

void EntityFeatureTable::Set(const std::string &story_id, const std::string &character,
                             EntityFeatures features) {
  table_[{story_id, character}] = features;
}

EntityFeatures EntityFeatureTable::Lookup(const std::string &story_id,
                                          const std::string &character) const {
  auto it = table_.find({story_id, character});
  if (it != table_.end()) return it->second;
  it = table_.find({"", character});
  if (it != table_.end()) return it->second;
  return {};
}

EntityFeatureTable EntityFeatureTable::Read(const std::string &path) {
  EntityFeatureTable table;
  RecordFile file = ReadRecordFile(path);
  for (const Json &r : file.records) {
    int lineno = r.value("_line", 0);
    try {
      if (r.at("kind") != "entity") {
        throw ParseError(path, lineno, "expected entity record");
      }
      EntityFeatures f;
      std::string gender = r.value("gender", "");
      if (gender == "m") {
        f.gender = Gender::kMasculine;
      } else if (gender == "f") {
        f.gender = Gender::kFeminine;
      } else if (gender == "n") {
        f.gender = Gender::kNeuter;
      } else if (!gender.empty()) {
        throw ParseError(path, lineno, "gender must be m, f or n");
      }
      std::string number = r.value("number", "");
      if (number == "sg") {
        f.number = Number::kSingular;
      } else if (number == "pl") {
        f.number = Number::kPlural;
      } else if (!number.empty()) {
        throw ParseError(path, lineno, "number must be sg or pl");
      }
      table.Set(r.value("story_id", ""), r.at("character").get<std::string>(), f);
    } catch (const Json::exception &e) {
      throw ParseError(path, lineno, std::string("bad entity record: ") + e.what());
    }
  }
  return table;
}

std::vector<Json> EntityFeatureTable::ToRecords() const {
  std::vector<Json> out;
  for (const auto &[key, f] : table_) {
    Json r = {{"kind", "entity"}, {"character", key.second}};
    if (!key.first.empty()) r["story_id"] = key.first;
    switch (f.gender) {
      case Gender::kMasculine: r["gender"] = "m"; break;
      case Gender::kFeminine: r["gender"] = "f"; break;
      case Gender::kNeuter: r["gender"] = "n"; break;
      case Gender::kUnknown: break;
    }
    if (f.number == Number::kSingular) r["number"] = "sg";
    if (f.number == Number::kPlural) r["number"] = "pl";
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pronoun rules.

const std::vector<PronounRule> &KnownPronounRules() {
  static const std::vector<PronounRule> rules = {
      {"he", Gender::kMasculine, Number::kSingular, false, false, false},
      {"him", Gender::kMasculine, Number::kSingular, false, false, false},
      {"his", Gender::kMasculine, Number::kSingular, true, false, false},
      {"she", Gender::kFeminine, Number::kSingular, false, false, false},
      {"her", Gender::kFeminine, Number::kSingular, false, true, false},
      {"hers", Gender::kFeminine, Number::kSingular, true, false, false},
      {"it", Gender::kNeuter, Number::kSingular, false, false, false},
      {"its", Gender::kNeuter, Number::kSingular, true, false, false},
      {"they", Gender::kUnknown, Number::kPlural, false, false, true},
      {"them", Gender::kUnknown, Number::kPlural, false, false, true},
      {"their", Gender::kUnknown, Number::kPlural, true, false, true},
  };
  return rules;
}

std::vector<std::string> DefaultTargetPronouns() {
  return {"he", "his", "they", "him", "she", "her", "it", "its"};
}

std::string_view CorefFlagKindName(CorefFlag::Kind kind) {
  return kind == CorefFlag::Kind::kUnresolved ? "unresolved" : "plural_fallback";
}

RuleCorefResolver::RuleCorefResolver(const std::vector<std::string> &targets) {
  for (const std::string &t : targets) {
    std::string lower = ToLower(Trim(t));
    auto it = std::find_if(KnownPronounRules().begin(), KnownPronounRules().end(),
                           [&](const PronounRule &r) { return r.surface == lower; });
    if (it == KnownPronounRules().end()) {
      throw ConfigError("no resolution rule for pronoun '" + t + "'");
    }
    if (std::none_of(rules_.begin(), rules_.end(),
                     [&](const PronounRule &r) { return r.surface == lower; })) {
      rules_.push_back(*it);
    }
  }
}

// ---------------------------------------------------------------------------
// Resolution.

namespace {

struct Word {
  size_t begin;
  size_t end;
  std::string lower;  // lower-cased, possessive suffix removed
  bool possessive;
};

std::vector<Word> Words(const std::string &text) {
  std::vector<Word> words;
  size_t i = 0;
  while (i < text.size()) {
    if (!IsWordChar(text[i])) {
      ++i;
      continue;
    }
    size_t b = i;
    while (i < text.size() && IsWordChar(text[i])) ++i;
    std::string w = ToLower(std::string_view(text).substr(b, i - b));
    // Quotes glued to a word are not part of it.
    size_t lead = 0;
    while (lead < w.size() && w[lead] == '\'') ++lead;
    size_t trail = w.size();
    bool possessive = false;
    if (trail >= 2 && w.compare(trail - 2, 2, "'s") == 0 && trail - 2 > lead) {
      possessive = true;
      trail -= 2;
    }
    while (trail > lead && w[trail - 1] == '\'') --trail;
    if (trail <= lead) continue;
    words.push_back({b + lead, b + trail + (possessive ? 2 : 0),
                     w.substr(lead, trail - lead), possessive});
  }
  return words;
}

const std::set<std::string> &NonNounFollowers() {
  static const std::set<std::string> words = {
      "to",    "at",   "in",    "on",    "with", "and",     "or",   "for",  "from",
      "by",    "up",   "out",   "off",   "back", "down",    "away", "again", "too",
      "so",    "but",  "about", "into",  "over", "a",       "an",   "the",  "that",
      "this",  "as",   "then",  "home",  "very", "because", "when", "if",   "after",
      "before", "now", "there", "here",  "once", "while",   "until", "all",  "just"};
  return words;
}

struct Mention {
  std::string character;
};

bool Compatible(const PronounRule &rule, const EntityFeatures &f) {
  if (rule.gender != Gender::kUnknown && f.gender != Gender::kUnknown &&
      f.gender != rule.gender) {
    return false;
  }
  if (f.number != Number::kUnknown && f.number != rule.number) return false;
  return true;
}

}  // namespace

CorefResult RuleCorefResolver::Resolve(const Story &story,
                                       const std::vector<std::string> &roster,
                                       const EntityFeatureTable &features) const {
  CorefResult result;
  result.story = story;

  // Roster names as lower-case word sequences, longest first so that
  // multiword names win over their prefixes.
  struct Name {
    std::string character;
    std::vector<std::string> words;
  };
  std::vector<Name> names;
  for (const std::string &c : roster) {
    Name n{c, {}};
    for (const Word &w : Words(c)) n.words.push_back(w.lower);
    if (!n.words.empty()) names.push_back(std::move(n));
  }
  std::stable_sort(names.begin(), names.end(), [](const Name &a, const Name &b) {
    if (a.words.size() != b.words.size()) return a.words.size() > b.words.size();
    return a.character < b.character;
  });

  std::vector<std::string> collective;
  for (const std::string &c : roster) {
    if (features.Lookup(story.story_id, c).number == Number::kPlural) {
      collective.push_back(c);
    }
  }
  std::sort(collective.begin(), collective.end());

  std::vector<Mention> mentions;  // in reading order
  for (EventLine &line : result.story.lines) {
    const std::string &text = line.text;
    std::vector<Word> words = Words(text);
    std::string out;
    size_t copied = 0;

    for (size_t i = 0; i < words.size();) {
      // Roster mention?
      const Name *matched = nullptr;
      for (const Name &n : names) {
        if (i + n.words.size() > words.size()) continue;
        bool ok = true;
        for (size_t k = 0; k < n.words.size() && ok; ++k) {
          const Word &w = words[i + k];
          ok = w.lower == n.words[k] && (!w.possessive || k + 1 == n.words.size());
        }
        if (ok) {
          matched = &n;
          break;
        }
      }
      if (matched != nullptr) {
        mentions.push_back({matched->character});
        i += matched->words.size();
        continue;
      }

      const Word &w = words[i];
      auto rule = std::find_if(rules_.begin(), rules_.end(), [&](const PronounRule &r) {
        return !w.possessive && r.surface == w.lower;
      });
      if (rule == rules_.end()) {
        ++i;
        continue;
      }

      std::optional<std::string> antecedent;
      bool fallback = false;
      if (rule->collective) {
        for (auto m = mentions.rbegin(); m != mentions.rend() && !antecedent; ++m) {
          if (features.Lookup(story.story_id, m->character).number == Number::kPlural) {
            antecedent = m->character;
          }
        }
        if (!antecedent && !collective.empty()) antecedent = collective.front();
        if (!antecedent && !mentions.empty()) {
          antecedent = mentions.back().character;
          fallback = true;
        }
      } else {
        for (auto m = mentions.rbegin(); m != mentions.rend() && !antecedent; ++m) {
          if (Compatible(*rule, features.Lookup(story.story_id, m->character))) {
            antecedent = m->character;
          }
        }
      }

      if (!antecedent) {
        result.flags.push_back(
            {CorefFlag::Kind::kUnresolved, line.index, w.begin, w.lower, ""});
        ++i;
        continue;
      }
      if (fallback) {
        result.flags.push_back(
            {CorefFlag::Kind::kPluralFallback, line.index, w.begin, w.lower, *antecedent});
      }

      bool possessive = rule->possessive;
      if (rule->possessive_if_followed && i + 1 < words.size()) {
        // Only whitespace between the pronoun and the next word.
        const Word &next = words[i + 1];
        bool adjacent = true;
        for (size_t p = w.end; p < next.begin; ++p) {
          adjacent &= std::isspace(static_cast<unsigned char>(text[p])) != 0;
        }
        possessive = adjacent && !NonNounFollowers().count(next.lower);
      }
      std::string replacement = *antecedent;
      if (std::isupper(static_cast<unsigned char>(text[w.begin])) && !replacement.empty()) {
        replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
      }
      if (possessive) replacement += "'s";
      out.append(text, copied, w.begin - copied);
      out += replacement;
      copied = w.end;
      mentions.push_back({*antecedent});
      ++i;
    }
    out.append(text, copied, std::string::npos);
    line.resolved_text = std::move(out);
  }
  return result;
}

}  // namespace emotrack
