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

#ifndef EMOTRACK_COREF_H_
#define EMOTRACK_COREF_H_

#include <map>
#include <string>
#include <vector>

#include "emotrack/corpus.h"

namespace emotrack {

enum class Gender { kUnknown, kMasculine, kFeminine, kNeuter };
enum class Number { kUnknown, kSingular, kPlural };

// Unknown values act as wildcards when matching pronouns.
struct EntityFeatures {
  Gender gender = Gender::kUnknown;
  Number number = Number::kUnknown;
};

// Per-character features, optionally scoped to a single story.
class EntityFeatureTable {
 public:
  void Set(const std::string &story_id, const std::string &character,
           EntityFeatures features);
  // Story-scoped entries take precedence over global ("") ones.
  EntityFeatures Lookup(const std::string &story_id, const std::string &character) const;
  bool Empty() const { return table_.empty(); }

  // Sidecar file: line records {"kind":"entity","character":..,
  // "gender":"m|f|n","number":"sg|pl"} with an optional "story_id".
  static EntityFeatureTable Read(const std::string &path);
  std::vector<Json> ToRecords() const;

 private:
  std::map<std::pair<std::string, std::string>, EntityFeatures> table_;
};

// How one target pronoun is resolved.
struct PronounRule {
  std::string surface;                  // lower-case form
  Gender gender = Gender::kUnknown;     // kUnknown: any gender
  Number number = Number::kSingular;
  bool possessive = false;              // substitute "<Entity>'s"
  bool possessive_if_followed = false;  // "her": possessive before a noun
  bool collective = false;              // "they": plural roster fallback
};

// Inventory of rules the resolver knows. Target lists may only name these.
const std::vector<PronounRule> &KnownPronounRules();

// he, his, him, they plus she, her, it, its.
std::vector<std::string> DefaultTargetPronouns();

struct CorefFlag {
  enum class Kind {
    kUnresolved,      // no compatible antecedent, text left unchanged
    kPluralFallback,  // "they" bound to the most recent singular entity
  };
  Kind kind = Kind::kUnresolved;
  int line = 0;
  size_t offset = 0;  // byte offset of the pronoun in the original line
  std::string pronoun;
  std::string antecedent;  // empty for kUnresolved
};

std::string_view CorefFlagKindName(CorefFlag::Kind kind);

struct CorefResult {
  Story story;  // resolved_text filled for every line
  std::vector<CorefFlag> flags;
};

// Contract for a pronoun resolver. Implementations must be pure functions
// of their inputs.
class CorefResolver {
 public:
  virtual ~CorefResolver() = default;
  virtual std::string Name() const = 0;
  virtual CorefResult Resolve(const Story &story, const std::vector<std::string> &roster,
                              const EntityFeatureTable &features) const = 0;
};

// Most-recent-compatible-antecedent resolver. Mentions are roster names
// found in the line text (case-insensitive, possessive "'s" allowed);
// resolved pronouns count as mentions of their antecedent.
class RuleCorefResolver : public CorefResolver {
 public:
  // Throws ConfigError if a target has no rule.
  explicit RuleCorefResolver(
      const std::vector<std::string> &targets = DefaultTargetPronouns());

  std::string Name() const override { return "rule-most-recent-v1"; }
  CorefResult Resolve(const Story &story, const std::vector<std::string> &roster,
                      const EntityFeatureTable &features) const override;

  const std::vector<PronounRule> &rules() const { return rules_; }

 private:
  std::vector<PronounRule> rules_;
};

}  // namespace emotrack

#endif  // EMOTRACK_COREF_H_
