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

#include "emotrack/corpus.h"

#include <algorithm>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "csv.h"
#include "emotrack/errors.h"
#include "emotrack/text.h"

namespace emotrack {

bool Story::HasCharacter(const std::string &name) const {
  return std::find(characters.begin(), characters.end(), name) != characters.end();
}

std::string ToString(const PairKey &key) {
  return key.story_id + ":" + std::to_string(key.line) + ":" + key.character;
}

std::string_view AggregationName(Aggregation rule) {
  switch (rule) {
    case Aggregation::kMajority: return "majority";
    case Aggregation::kAny: return "any";
    case Aggregation::kAll: return "all";
  }
  return "majority";
}

Aggregation ParseAggregation(std::string_view name) {
  std::string lower = ToLower(Trim(name));
  if (lower == "majority") return Aggregation::kMajority;
  if (lower == "any") return Aggregation::kAny;
  if (lower == "all") return Aggregation::kAll;
  throw ConfigError("unknown aggregation rule: " + std::string(name));
}

EmotionSet Aggregate(const VoteCounts &votes, int num_annotators, Aggregation rule) {
  EmotionSet gold;
  const int majority = (num_annotators + 1) / 2;
  for (Emotion e : kAllEmotions) {
    int v = votes[Index(e)];
    bool keep = false;
    switch (rule) {
      case Aggregation::kMajority: keep = v > 0 && v >= majority; break;
      case Aggregation::kAny: keep = v >= 1; break;
      case Aggregation::kAll: keep = num_annotators > 0 && v >= num_annotators; break;
    }
    if (keep) gold.Insert(e);
  }
  return gold;
}

const Story *Corpus::FindStory(const std::string &story_id) const {
  for (const Story &s : stories) {
    if (s.story_id == story_id) return &s;
  }
  return nullptr;
}

std::map<PairKey, const GoldAnnotation *> Corpus::GoldIndex() const {
  std::map<PairKey, const GoldAnnotation *> index;
  for (const GoldAnnotation &a : annotations) index[a.Key()] = &a;
  return index;
}

// ---------------------------------------------------------------------------
// Import configuration.

const std::string &TableMapping::Column(const std::string &field) const {
  auto it = columns.find(field);
  if (it == columns.end()) throw ConfigError("no column mapping for field " + field);
  return it->second;
}

ImportConfig ImportConfig::Defaults() {
  ImportConfig config;
  config.stories.columns = {
      {"story_id", "storyid"}, {"split", "split"},           {"line", "linenum"},
      {"text", "sentence"},    {"characters", "characters"},
  };
  config.annotations.columns = {
      {"story_id", "storyid"},  {"line", "linenum"},    {"character", "char"},
      {"annotator", "workerid"}, {"labels", "plutchik"},
  };
  return config;
}

namespace {

const std::set<std::string> kStoryFields = {"story_id", "split", "line", "text",
                                            "characters"};
const std::set<std::string> kAnnotationFields = {"story_id", "line", "character",
                                                 "annotator", "labels"};

void ApplyTable(const Json &j, const std::set<std::string> &fields,
                const std::string &base_dir, TableMapping *table) {
  if (!j.is_object()) throw ConfigError("table mapping must be an object");
  for (auto &[key, value] : j.items()) {
    if (key == "file") {
      std::filesystem::path p = value.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      table->file = p.string();
    } else if (key == "columns") {
      for (auto &[field, column] : value.items()) {
        if (!fields.count(field)) throw ConfigError("unknown field in column mapping: " + field);
        table->columns[field] = column.get<std::string>();
      }
    } else {
      throw ConfigError("unknown key in table mapping: " + key);
    }
  }
}

}  // namespace

ImportConfig ImportConfig::FromJson(const Json &j, const std::string &base_dir) {
  ImportConfig config = Defaults();
  if (!j.is_object()) throw ConfigError("importer config must be a JSON object");
  try {
    for (auto &[key, value] : j.items()) {
      if (key == "aggregation") {
        config.aggregation = ParseAggregation(value.get<std::string>());
      } else if (key == "line_base") {
        config.line_base = value.get<int>();
      } else if (key == "min_intensity") {
        config.min_intensity = value.get<int>();
      } else if (key == "roster_separator") {
        std::string sep = value.get<std::string>();
        if (sep.size() != 1) throw ConfigError("roster_separator must be one character");
        config.roster_separator = sep[0];
      } else if (key == "stories") {
        ApplyTable(value, kStoryFields, base_dir, &config.stories);
      } else if (key == "annotations") {
        ApplyTable(value, kAnnotationFields, base_dir, &config.annotations);
      } else {
        throw ConfigError("unknown importer config key: " + key);
      }
    }
  } catch (const Json::exception &e) {
    throw ConfigError(std::string("bad importer config: ") + e.what());
  }
  return config;
}

Json ImportConfig::ToJson() const {
  Json j;
  j["aggregation"] = std::string(AggregationName(aggregation));
  j["line_base"] = line_base;
  j["min_intensity"] = min_intensity;
  j["roster_separator"] = std::string(1, roster_separator);
  j["stories"] = {{"file", stories.file}, {"columns", stories.columns}};
  j["annotations"] = {{"file", annotations.file}, {"columns", annotations.columns}};
  return j;
}

// ---------------------------------------------------------------------------
// Import.

namespace {

int ParseInt(const std::string &s, const std::string &origin, int line,
             const std::string &what) {
  std::string_view t = Trim(s);
  if (t.empty()) throw ParseError(origin, line, "empty " + what);
  size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(std::string(t), &pos);
  } catch (const std::exception &) {
    throw ParseError(origin, line, "non-integer " + what + ": " + s);
  }
  if (pos != t.size()) throw ParseError(origin, line, "non-integer " + what + ": " + s);
  return value;
}

// Parses a label cell into the emotions it votes for.
EmotionSet ParseLabels(const std::string &cell, int min_intensity,
                       const std::string &origin, int line) {
  std::vector<std::string> items;
  std::string_view t = Trim(cell);
  if (!t.empty() && t.front() == '[') {
    Json list;
    try {
      list = Json::parse(t);
    } catch (const Json::parse_error &) {
      throw ParseError(origin, line, "malformed label list: " + cell);
    }
    if (!list.is_array()) throw ParseError(origin, line, "malformed label list: " + cell);
    for (const Json &item : list) {
      if (!item.is_string()) throw ParseError(origin, line, "non-string label in " + cell);
      items.push_back(item.get<std::string>());
    }
  } else {
    for (char sep : {',', ';'}) {
      if (t.find(sep) != std::string_view::npos) {
        items = Split(t, sep);
        break;
      }
    }
    if (items.empty() && !t.empty()) items.emplace_back(t);
  }

  EmotionSet votes;
  for (const std::string &raw : items) {
    std::string_view item = Trim(raw);
    if (item.empty() || ToLower(item) == "none") continue;
    std::string_view name = item;
    int intensity = min_intensity;
    size_t colon = item.find(':');
    if (colon != std::string_view::npos) {
      name = Trim(item.substr(0, colon));
      intensity = ParseInt(std::string(item.substr(colon + 1)), origin, line, "intensity");
    }
    auto e = ParseEmotion(name);
    if (!e) throw ParseError(origin, line, "unknown emotion label: " + std::string(name));
    if (intensity >= min_intensity) votes.Insert(*e);
  }
  return votes;
}

std::string Cell(const CsvRow &row, int column) {
  return column < 0 ? std::string() : row.fields[column];
}

int RequireColumn(const CsvTable &table, const TableMapping &mapping,
                  const std::string &field) {
  const std::string &name = mapping.Column(field);
  int index = table.ColumnIndex(name);
  if (index < 0) {
    throw ParseError(mapping.file, 1, "missing column '" + name + "' for field " + field);
  }
  return index;
}

int OptionalColumn(const CsvTable &table, const TableMapping &mapping,
                   const std::string &field) {
  auto it = mapping.columns.find(field);
  if (it == mapping.columns.end()) return -1;
  return table.ColumnIndex(it->second);
}

}  // namespace

ImportResult ImportCorpus(const ImportConfig &config) {
  ImportResult result;
  Corpus &corpus = result.corpus;
  corpus.aggregation = config.aggregation;

  // Stories.
  const std::string &story_file = config.stories.file;
  CsvTable stories = ParseCsv(ReadFileOrThrow(story_file), story_file);
  const int c_story = RequireColumn(stories, config.stories, "story_id");
  const int c_line = RequireColumn(stories, config.stories, "line");
  const int c_text = RequireColumn(stories, config.stories, "text");
  const int c_split = OptionalColumn(stories, config.stories, "split");
  const int c_chars = OptionalColumn(stories, config.stories, "characters");

  std::unordered_map<std::string, size_t> story_pos;
  std::vector<std::map<int, std::pair<std::string, int>>> pending_lines;
  std::vector<bool> explicit_roster;
  for (const CsvRow &row : stories.rows) {
    std::string id(Trim(row.fields[c_story]));
    if (id.empty()) throw ParseError(story_file, row.line, "empty story id");
    int line = ParseInt(row.fields[c_line], story_file, row.line, "line number") -
               config.line_base;
    if (line < 0) throw ParseError(story_file, row.line, "line number below line_base");
    std::string text(Trim(row.fields[c_text]));
    if (text.empty()) throw ParseError(story_file, row.line, "empty sentence");

    auto [it, inserted] = story_pos.emplace(id, corpus.stories.size());
    if (inserted) {
      Story story;
      story.story_id = id;
      corpus.stories.push_back(std::move(story));
      pending_lines.emplace_back();
      explicit_roster.push_back(false);
    }
    size_t s = it->second;
    Story &story = corpus.stories[s];
    std::string split(Trim(Cell(row, c_split)));
    if (!split.empty()) story.split = split;
    if (!pending_lines[s].emplace(line, std::make_pair(text, row.line)).second) {
      throw ParseError(story_file, row.line, "duplicate line " + std::to_string(line) +
                                                 " in story " + id);
    }
    std::string roster(Trim(Cell(row, c_chars)));
    if (!roster.empty()) {
      explicit_roster[s] = true;
      for (const std::string &part : Split(roster, config.roster_separator)) {
        std::string name(Trim(part));
        if (!name.empty() && !story.HasCharacter(name)) story.characters.push_back(name);
      }
    }
  }
  for (size_t s = 0; s < corpus.stories.size(); ++s) {
    int expected = 0;
    for (auto &[index, entry] : pending_lines[s]) {
      if (index != expected) {
        throw ParseError(story_file, entry.second,
                         "story " + corpus.stories[s].story_id + " skips line " +
                             std::to_string(expected + config.line_base));
      }
      corpus.stories[s].lines.push_back({index, entry.first, ""});
      ++expected;
    }
  }

  // Annotations.
  const std::string &ann_file = config.annotations.file;
  CsvTable anns = ParseCsv(ReadFileOrThrow(ann_file), ann_file);
  const int a_story = RequireColumn(anns, config.annotations, "story_id");
  const int a_line = RequireColumn(anns, config.annotations, "line");
  const int a_char = RequireColumn(anns, config.annotations, "character");
  const int a_labels = RequireColumn(anns, config.annotations, "labels");
  const int a_annotator = OptionalColumn(anns, config.annotations, "annotator");

  struct Pending {
    size_t story_pos;
    std::map<std::string, EmotionSet> by_annotator;
  };
  std::map<PairKey, Pending> pairs;
  std::vector<std::vector<std::string>> seen_chars(corpus.stories.size());
  for (size_t r = 0; r < anns.rows.size(); ++r) {
    const CsvRow &row = anns.rows[r];
    std::string id(Trim(row.fields[a_story]));
    int line = ParseInt(row.fields[a_line], ann_file, row.line, "line number") -
               config.line_base;
    std::string character(Trim(row.fields[a_char]));
    EmotionSet votes = ParseLabels(row.fields[a_labels], config.min_intensity, ann_file,
                                   row.line);
    std::string locus = ann_file + ":" + std::to_string(row.line);

    auto it = story_pos.find(id);
    if (it == story_pos.end()) {
      result.rejected.push_back(locus + ": unknown story " + id);
      continue;
    }
    const Story &story = corpus.stories[it->second];
    if (line < 0 || line >= static_cast<int>(story.lines.size())) {
      result.rejected.push_back(locus + ": story " + id + " has no line " +
                                std::to_string(line + config.line_base));
      continue;
    }
    if (character.empty()) {
      result.rejected.push_back(locus + ": empty character");
      continue;
    }
    if (explicit_roster[it->second] && !story.HasCharacter(character)) {
      result.rejected.push_back(locus + ": unknown character " + character +
                                " in story " + id);
      continue;
    }
    auto &chars = seen_chars[it->second];
    if (std::find(chars.begin(), chars.end(), character) == chars.end()) {
      chars.push_back(character);
    }
    std::string annotator = a_annotator >= 0 ? std::string(Trim(row.fields[a_annotator]))
                                             : std::string();
    if (annotator.empty()) annotator = "#row" + std::to_string(r);
    Pending &p = pairs.try_emplace(PairKey{id, line, character}, Pending{it->second, {}})
                     .first->second;
    EmotionSet &acc = p.by_annotator[annotator];
    acc = acc.Union(votes);
  }

  for (size_t s = 0; s < corpus.stories.size(); ++s) {
    if (!explicit_roster[s]) corpus.stories[s].characters = seen_chars[s];
  }

  for (auto &[key, pending] : pairs) {
    GoldAnnotation a;
    a.story_id = key.story_id;
    a.line_index = key.line;
    a.character = key.character;
    a.num_annotators = static_cast<int>(pending.by_annotator.size());
    for (auto &[annotator, set] : pending.by_annotator) {
      for (Emotion e : set.Members()) ++a.votes[Index(e)];
    }
    a.gold = Aggregate(a.votes, a.num_annotators, config.aggregation);
    corpus.annotations.push_back(std::move(a));
  }
  std::stable_sort(corpus.annotations.begin(), corpus.annotations.end(),
                   [&](const GoldAnnotation &x, const GoldAnnotation &y) {
                     size_t px = story_pos.at(x.story_id);
                     size_t py = story_pos.at(y.story_id);
                     if (px != py) return px < py;
                     if (x.line_index != y.line_index) return x.line_index < y.line_index;
                     return x.character < y.character;
                   });
  return result;
}

// ---------------------------------------------------------------------------
// Validation.

std::vector<Violation> ValidateCorpus(const Corpus &corpus) {
  std::vector<Violation> out;
  std::set<std::string> ids;
  for (const Story &story : corpus.stories) {
    const std::string &id = story.story_id;
    if (id.empty()) out.push_back({id, "story", "empty story id"});
    if (!ids.insert(id).second) out.push_back({id, "story", "duplicate story id"});
    if (story.lines.empty()) out.push_back({id, "lines", "story has no lines"});
    for (size_t i = 0; i < story.lines.size(); ++i) {
      const EventLine &line = story.lines[i];
      std::string locus = "line " + std::to_string(i);
      if (line.index != static_cast<int>(i)) {
        out.push_back({id, locus, "line index " + std::to_string(line.index) +
                                      " breaks contiguous numbering"});
      }
      if (Trim(line.text).empty()) out.push_back({id, locus, "empty line text"});
    }
    std::set<std::string> names;
    for (const std::string &c : story.characters) {
      if (Trim(c).empty()) out.push_back({id, "characters", "empty character name"});
      if (!names.insert(c).second) {
        out.push_back({id, "characters", "duplicate character name '" + c + "'"});
      }
    }
  }

  std::set<PairKey> keys;
  for (const GoldAnnotation &a : corpus.annotations) {
    std::string locus = "annotation " + ToString(a.Key());
    const Story *story = corpus.FindStory(a.story_id);
    if (story == nullptr) {
      out.push_back({a.story_id, locus, "annotation references unknown story"});
    } else {
      if (a.line_index < 0 || a.line_index >= static_cast<int>(story->lines.size())) {
        out.push_back({a.story_id, locus, "annotation references unknown line"});
      }
      if (!story->HasCharacter(a.character)) {
        out.push_back({a.story_id, locus, "annotation references unknown character"});
      }
    }
    if (!keys.insert(a.Key()).second) {
      out.push_back({a.story_id, locus, "duplicate annotation"});
    }
    for (const std::string &label : a.foreign_labels) {
      out.push_back({a.story_id, locus, "gold emotion '" + label +
                                            "' is not a Plutchik basic emotion"});
    }
    bool bad_votes = a.num_annotators < 0;
    for (int v : a.votes) bad_votes |= v < 0 || v > a.num_annotators;
    if (bad_votes) {
      out.push_back({a.story_id, locus, "vote counts inconsistent with annotator count"});
    } else if (a.foreign_labels.empty() &&
               Aggregate(a.votes, a.num_annotators, corpus.aggregation) != a.gold) {
      out.push_back({a.story_id, locus, "gold set does not follow from the votes under " +
                                            std::string(AggregationName(corpus.aggregation))});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical records.

std::vector<Json> CorpusToRecords(const Corpus &corpus) {
  std::vector<Json> records;
  for (const Story &story : corpus.stories) {
    records.push_back({{"kind", "story"},
                       {"story_id", story.story_id},
                       {"split", story.split},
                       {"characters", story.characters}});
    for (const EventLine &line : story.lines) {
      records.push_back({{"kind", "line"},
                         {"story_id", story.story_id},
                         {"index", line.index},
                         {"text", line.text},
                         {"resolved_text", line.resolved_text}});
    }
  }
  for (const GoldAnnotation &a : corpus.annotations) {
    Json votes = Json::object();
    for (Emotion e : kAllEmotions) {
      if (a.votes[Index(e)] != 0) votes[std::string(EmotionName(e))] = a.votes[Index(e)];
    }
    std::vector<std::string> gold = a.gold.Names();
    gold.insert(gold.end(), a.foreign_labels.begin(), a.foreign_labels.end());
    records.push_back({{"kind", "annotation"},
                       {"story_id", a.story_id},
                       {"line_index", a.line_index},
                       {"character", a.character},
                       {"annotators", a.num_annotators},
                       {"votes", votes},
                       {"gold", gold}});
  }
  return records;
}

Corpus CorpusFromRecords(const RecordFile &file, const std::string &origin) {
  Corpus corpus;
  if (file.header.is_object() && file.header.contains("aggregation")) {
    corpus.aggregation = ParseAggregation(file.header["aggregation"].get<std::string>());
  }
  std::unordered_map<std::string, size_t> pos;
  for (const Json &r : file.records) {
    int lineno = r.value("_line", 0);
    try {
      const std::string kind = r.at("kind").get<std::string>();
      if (kind == "story") {
        Story story;
        story.story_id = r.at("story_id").get<std::string>();
        story.split = r.value("split", "");
        story.characters = r.at("characters").get<std::vector<std::string>>();
        pos[story.story_id] = corpus.stories.size();
        corpus.stories.push_back(std::move(story));
      } else if (kind == "line") {
        auto it = pos.find(r.at("story_id").get<std::string>());
        if (it == pos.end()) throw ParseError(origin, lineno, "line before its story record");
        corpus.stories[it->second].lines.push_back(
            {r.at("index").get<int>(), r.at("text").get<std::string>(),
             r.value("resolved_text", "")});
      } else if (kind == "annotation") {
        GoldAnnotation a;
        a.story_id = r.at("story_id").get<std::string>();
        a.line_index = r.at("line_index").get<int>();
        a.character = r.at("character").get<std::string>();
        a.num_annotators = r.at("annotators").get<int>();
        for (auto &[name, count] : r.at("votes").items()) {
          auto e = ParseEmotion(name);
          if (!e) throw ParseError(origin, lineno, "vote for unknown emotion " + name);
          a.votes[Index(*e)] = count.get<int>();
        }
        for (const std::string &name : r.at("gold").get<std::vector<std::string>>()) {
          if (auto e = ParseEmotion(name)) {
            a.gold.Insert(*e);
          } else {
            a.foreign_labels.push_back(name);
          }
        }
        corpus.annotations.push_back(std::move(a));
      } else {
        throw ParseError(origin, lineno, "unexpected record kind " + kind);
      }
    } catch (const Json::exception &e) {
      throw ParseError(origin, lineno, std::string("bad corpus record: ") + e.what());
    }
  }
  return corpus;
}

void WriteCorpus(const std::string &path, const Corpus &corpus, const Json &header) {
  Json h = header.is_null() ? Json::object() : header;
  h["kind"] = "header";
  h["artifact"] = "corpus";
  h["aggregation"] = std::string(AggregationName(corpus.aggregation));
  WriteRecordFile(path, h, CorpusToRecords(corpus));
}

Corpus ReadCorpus(const std::string &path) {
  return CorpusFromRecords(ReadRecordFile(path), path);
}

}  // namespace emotrack
