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

#ifndef EMOTRACK_SYNTHETIC_H_
#define EMOTRACK_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "emotrack/conllu.h"
#include "emotrack/corpus.h"
#include "emotrack/roles.h"

namespace emotrack {

struct SyntheticOptions {
  int stories = 50;
  int lines = 5;
  uint64_t seed = 20260101;
  int annotators = 3;
};

// A StoryCommonsense-shaped release generated from templates, together
// with its hand-free ground truth: resolved sentences, their dependency
// parses, and the roles the parses encode.
struct SyntheticRelease {
  std::string stories_csv;      // storyid,split,linenum,sentence,characters
  std::string annotations_csv;  // storyid,linenum,char,workerid,plutchik
  std::string entities;         // entity feature sidecar records
  std::vector<DepGraph> parses; // of the resolved sentences
  Json importer_config;         // relative file names

  std::vector<std::vector<std::string>> resolved;  // [story][line]
  std::vector<RoleAssignment> roles;               // encoded in `parses`
};

// Deterministic for a given options value. Every sentence text is unique
// across the release, each story has one male and one female named
// character, and about a third of the stories add the collective
// character "People".
SyntheticRelease GenerateSyntheticRelease(const SyntheticOptions &options);

// Writes stories.csv, annotations.csv, entities.jsonl, parses.conllu and
// importer.json into `dir` (created if needed).
void WriteSyntheticRelease(const SyntheticRelease &release, const std::string &dir);

}  // namespace emotrack

#endif  // EMOTRACK_SYNTHETIC_H_
