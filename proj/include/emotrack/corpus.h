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

#ifndef EMOTRACK_CORPUS_H_
#define EMOTRACK_CORPUS_H_

#include <array>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "emotrack/emotion.h"
#include "emotrack/records.h"

namespace emotrack {

// One story line (event). `resolved_text` stays empty until coreference
// resolution runs.
struct EventLine {
  int index = 0;
  std::string text;
  std::string resolved_text;

  // The text fed to downstream stages: resolved when available.
  const std::string &EventText() const {
    return resolved_text.empty() ? text : resolved_text;
  }

  friend bool operator==(const EventLine &, const EventLine &) = default;
};

struct Story {
  std::string story_id;
  std::string split;  // release split label, kept verbatim ("" if none)
  std::vector<EventLine> lines;
  std::vector<std::string> characters;

  bool HasCharacter(const std::string &name) const;

  friend bool operator==(const Story &, const Story &) = default;
};

// Key of an event-character pair.
struct PairKey {
  std::string story_id;
  int line = 0;
  std::string character;

  auto operator<=>(const PairKey &) const = default;
};

std::string ToString(const PairKey &key);  // "story:line:character"

enum class Aggregation { kMajority, kAny, kAll };

std::string_view AggregationName(Aggregation rule);
// Throws ConfigError on anything but majority / any / all.
Aggregation ParseAggregation(std::string_view name);

using VoteCounts = std::array<int, kNumEmotions>;

// Majority: votes >= ceil(K/2). Any: votes >= 1. All: votes == K (K > 0).
EmotionSet Aggregate(const VoteCounts &votes, int num_annotators, Aggregation rule);

struct GoldAnnotation {
  std::string story_id;
  int line_index = 0;
  std::string character;
  int num_annotators = 0;
  VoteCounts votes{};
  EmotionSet gold;
  // Label names read from a canonical file that fall outside the eight
  // emotions. Never produced by the importer; reported by ValidateCorpus.
  std::vector<std::string> foreign_labels;

  PairKey Key() const { return {story_id, line_index, character}; }

  friend bool operator==(const GoldAnnotation &, const GoldAnnotation &) = default;
};

struct Corpus {
  Aggregation aggregation = Aggregation::kMajority;
  std::vector<Story> stories;
  std::vector<GoldAnnotation> annotations;

  const Story *FindStory(const std::string &story_id) const;
  std::map<PairKey, const GoldAnnotation *> GoldIndex() const;

  friend bool operator==(const Corpus &, const Corpus &) = default;
};

// Column mapping for one table of an external release. `columns` maps a
// canonical field name to the header name used in the file.
struct TableMapping {
  std::string file;
  std::map<std::string, std::string> columns;

  const std::string &Column(const std::string &field) const;
};

// Importer configuration for StoryCommonsense-style releases: a stories
// table (one row per story line) and an annotations table (one row per
// annotator per event-character pair).
//
// Stories fields: story_id, split, line, text, characters.
// Annotations fields: story_id, line, character, annotator, labels.
//
// Labels are a list such as ["joy:3", "trust:2"] or ["none"]; a label
// counts as one annotator vote when its intensity is >= min_intensity
// (labels without an intensity always count).
struct ImportConfig {
  Aggregation aggregation = Aggregation::kMajority;
  int line_base = 1;
  int min_intensity = 1;
  char roster_separator = '|';
  TableMapping stories;
  TableMapping annotations;

  static ImportConfig Defaults();
  // Relative file paths are resolved against `base_dir`. Unknown keys are
  // rejected with ConfigError.
  static ImportConfig FromJson(const Json &config, const std::string &base_dir);
  Json ToJson() const;
};

struct ImportResult {
  Corpus corpus;
  std::vector<std::string> rejected;  // one message per rejected record
};

// Throws ParseError with file/line locus for malformed records.
ImportResult ImportCorpus(const ImportConfig &config);

struct Violation {
  std::string story_id;
  std::string locus;
  std::string message;
};

std::vector<Violation> ValidateCorpus(const Corpus &corpus);

std::vector<Json> CorpusToRecords(const Corpus &corpus);
// Throws ParseError on records that do not match the schema.
Corpus CorpusFromRecords(const RecordFile &file, const std::string &origin);

void WriteCorpus(const std::string &path, const Corpus &corpus, const Json &header);
Corpus ReadCorpus(const std::string &path);

}  // namespace emotrack

#endif  // EMOTRACK_CORPUS_H_
