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

#include "emotrack/conllu.h"

#include <sstream>

#include "emotrack/errors.h"
#include "emotrack/records.h"
#include "emotrack/text.h"

namespace emotrack {

std::vector<int> DepGraph::Dependents(int head) const {
  std::vector<int> out;
  for (const DepToken &t : tokens) {
    if (t.head == head) out.push_back(t.id);
  }
  return out;
}

std::vector<int> DepGraph::Dependents(int head, const std::string &deprel) const {
  std::vector<int> out;
  for (const DepToken &t : tokens) {
    if (t.head == head && t.deprel == deprel) out.push_back(t.id);
  }
  return out;
}

std::optional<std::pair<std::string, int>> DepGraph::StoryLine() const {
  size_t colon = sent_id.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == sent_id.size()) {
    return std::nullopt;
  }
  int line = 0;
  for (size_t i = colon + 1; i < sent_id.size(); ++i) {
    if (sent_id[i] < '0' || sent_id[i] > '9') return std::nullopt;
    line = line * 10 + (sent_id[i] - '0');
  }
  return std::make_pair(sent_id.substr(0, colon), line);
}

std::string BaseRelation(const std::string &deprel) {
  size_t colon = deprel.find(':');
  return colon == std::string::npos ? deprel : deprel.substr(0, colon);
}

namespace {

bool ParseIntStrict(const std::string &s, int *out) {
  if (s.empty() || s.size() > 9) return false;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  *out = v;
  return true;
}

std::string Field(const std::string &s) { return s == "_" ? std::string() : s; }

std::string Placeholder(const std::string &s) { return s.empty() ? "_" : s; }

}  // namespace

std::vector<DepGraph> ParseConllu(const std::string &text, const std::string &origin) {
  std::vector<DepGraph> graphs;
  DepGraph current;
  bool open = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  auto flush = [&] {
    if (open) graphs.push_back(std::move(current));
    current = DepGraph();
    open = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    open = true;
    if (line[0] == '#') {
      std::string body(Trim(std::string_view(line).substr(1)));
      current.comments.push_back(body);
      size_t eq = body.find('=');
      if (eq != std::string::npos) {
        std::string key(Trim(std::string_view(body).substr(0, eq)));
        std::string value(Trim(std::string_view(body).substr(eq + 1)));
        if (key == "sent_id") current.sent_id = value;
        if (key == "text") current.text = value;
      }
      continue;
    }
    std::vector<std::string> cols = Split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(origin, lineno,
                       "expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()));
    }
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos) {
      continue;
    }
    DepToken tok;
    if (!ParseIntStrict(cols[0], &tok.id) || tok.id < 1) {
      throw ParseError(origin, lineno, "non-integer token id: " + cols[0]);
    }
    if (!ParseIntStrict(cols[6], &tok.head)) {
      throw ParseError(origin, lineno, "non-integer head: " + cols[6]);
    }
    if (tok.id != static_cast<int>(current.tokens.size()) + 1) {
      throw ParseError(origin, lineno, "token id " + cols[0] + " out of sequence");
    }
    tok.form = cols[1];
    tok.lemma = Field(cols[2]);
    tok.upos = Field(cols[3]);
    tok.xpos = Field(cols[4]);
    tok.feats = Field(cols[5]);
    tok.deprel = Field(cols[7]);
    tok.deps = Field(cols[8]);
    tok.misc = Field(cols[9]);
    current.tokens.push_back(std::move(tok));
  }
  flush();
  return graphs;
}

std::vector<DepGraph> ReadConllu(const std::string &path) {
  return ParseConllu(ReadFileOrThrow(path), path);
}

std::string WriteConllu(const std::vector<DepGraph> &graphs) {
  std::ostringstream out;
  for (const DepGraph &g : graphs) {
    for (const std::string &c : g.comments) out << "# " << c << '\n';
    for (const DepToken &t : g.tokens) {
      out << t.id << '\t' << t.form << '\t' << Placeholder(t.lemma) << '\t'
          << Placeholder(t.upos) << '\t' << Placeholder(t.xpos) << '\t'
          << Placeholder(t.feats) << '\t' << t.head << '\t' << Placeholder(t.deprel)
          << '\t' << Placeholder(t.deps) << '\t' << Placeholder(t.misc) << '\n';
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> ValidateGraph(const DepGraph &graph) {
  std::vector<std::string> problems;
  const int n = static_cast<int>(graph.tokens.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const DepToken &t = graph.tokens[i];
    if (t.id != i + 1) problems.push_back("token ids are not contiguous at " + std::to_string(i + 1));
    if (t.head == 0) ++roots;
    if (t.head < 0 || t.head > n) {
      problems.push_back("token " + std::to_string(t.id) + " has head out of range");
    }
  }
  if (roots != 1) problems.push_back("expected exactly one root, found " + std::to_string(roots));
  for (const DepToken &t : graph.tokens) {
    int steps = 0;
    int h = t.head;
    while (h > 0 && h <= n && steps <= n) {
      h = graph.tokens[h - 1].head;
      ++steps;
    }
    if (steps > n) {
      problems.push_back("token " + std::to_string(t.id) + " is on a head cycle");
      break;
    }
  }
  return problems;
}

}  // namespace emotrack
