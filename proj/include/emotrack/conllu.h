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

#ifndef EMOTRACK_CONLLU_H_
#define EMOTRACK_CONLLU_H_

#include <optional>
#include <string>
#include <vector>

namespace emotrack {

// One syntactic word of a CoNLL-U sentence. Optional columns hold "" for
// the underscore placeholder.
struct DepToken {
  int id = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = 0;  // 0 = root
  std::string deprel;
  std::string deps;
  std::string misc;
};

struct DepGraph {
  std::string sent_id;  // from "# sent_id = ..." ("" when absent)
  std::string text;     // from "# text = ..."
  std::vector<std::string> comments;
  std::vector<DepToken> tokens;

  // Token by 1-based id; tokens are stored in id order.
  const DepToken &Token(int id) const { return tokens[id - 1]; }
  std::vector<int> Dependents(int head) const;
  // Dependents attached with exactly `deprel`.
  std::vector<int> Dependents(int head, const std::string &deprel) const;

  // Story id and line index from a "<story>:<line>" sentence id.
  std::optional<std::pair<std::string, int>> StoryLine() const;
};

// Universal Dependencies relation with its subtype removed ("nsubj:pass"
// -> "nsubj").
std::string BaseRelation(const std::string &deprel);

// Reads CoNLL-U text: 10 tab-separated columns, blank lines between
// sentences, '#' comment lines. Multiword-token ranges ("3-4") and empty
// nodes ("5.1") are skipped. Throws ParseError with the line number on a
// wrong column count or a non-integer id/head.
std::vector<DepGraph> ParseConllu(const std::string &text, const std::string &origin);
std::vector<DepGraph> ReadConllu(const std::string &path);

std::string WriteConllu(const std::vector<DepGraph> &graphs);

// Structural problems: number of roots != 1, head out of range, cycles,
// non-contiguous ids. Empty when the graph is well formed.
std::vector<std::string> ValidateGraph(const DepGraph &graph);

}  // namespace emotrack

#endif  // EMOTRACK_CONLLU_H_
