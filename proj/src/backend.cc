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

#include "emotrack/backend.h"

#include <algorithm>
#include <array>

#include "emotrack/engine.h"
#include "emotrack/errors.h"
#include "emotrack/roles.h"
#include "emotrack/text.h"

namespace emotrack {

namespace {

constexpr std::array<std::string_view, 9> kDimensionNames = {
    "xIntent", "xNeed", "xAttr", "xReact", "xWant", "xEffect", "oReact", "oWant", "oEffect",
};

std::string MissMessage(const std::string &event, Dimension d, const std::string &word) {
  std::string msg = "no stored inference for (\"" + event + "\", " +
                    std::string(DimensionName(d));
  if (!word.empty()) msg += ", \"" + word + "\"";
  return msg + ")";
}

}  // namespace

std::string_view DimensionName(Dimension d) { return kDimensionNames[static_cast<int>(d)]; }

std::optional<Dimension> ParseDimension(std::string_view name) {
  for (size_t i = 0; i < kDimensionNames.size(); ++i) {
    if (kDimensionNames[i] == name) return static_cast<Dimension>(i);
  }
  return std::nullopt;
}

bool IsActorSide(Dimension d) { return DimensionName(d).front() == 'x'; }

Dimension ReactDimension(Role role) {
  return role == Role::kActor ? Dimension::kXReact : Dimension::kOReact;
}

Dimension EffectDimension(Role role) {
  return role == Role::kActor ? Dimension::kXEffect : Dimension::kOEffect;
}

double ReactWordProb(const InferenceBackend &backend, const std::string &event, Role role,
                     const std::string &word) {
  return backend.WordProb(event, ReactDimension(role), word);
}

std::vector<std::string> CheckRecord(const InferenceRecord &record) {
  std::vector<std::string> problems;
  double sum = 0.0;
  for (const auto &[word, p] : record.word_probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      problems.push_back("probability of '" + word + "' outside [0,1]");
    }
    sum += p;
  }
  if (sum > 1.0 + kProbSumSlack) problems.push_back("word probabilities sum above 1");
  if (record.generated_text && record.generated_text->empty()) {
    problems.push_back("empty generated text");
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Fixture.

FixtureBackend::FixtureBackend(std::vector<InferenceRecord> records, std::string identity)
    : identity_(std::move(identity)) {
  for (InferenceRecord &r : records) {
    auto key = std::make_pair(r.event, r.dimension);
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, records_.size());
      records_.push_back(std::move(r));
      continue;
    }
    InferenceRecord &merged = records_[it->second];
    if (r.generated_text) merged.generated_text = r.generated_text;
    for (auto &[w, p] : r.word_probs) merged.word_probs[w] = p;
  }
  for (const InferenceRecord &r : records_) {
    auto problems = CheckRecord(r);
    if (!problems.empty()) {
      throw ParseError(identity_, 0, "fixture record (\"" + r.event + "\", " +
                                         std::string(DimensionName(r.dimension)) +
                                         "): " + problems.front());
    }
  }
}

FixtureBackend FixtureBackend::Read(const std::string &path) {
  RecordFile file = ReadRecordFile(path);
  std::string identity = "fixture";
  if (file.header.is_object() && file.header.contains("backend")) {
    identity = file.header["backend"].get<std::string>();
  }
  return FixtureBackend(FixtureFromRecords(file, path), identity);
}

std::string FixtureBackend::Generate(const std::string &event, Dimension dimension) const {
  auto it = index_.find({event, dimension});
  if (it == index_.end() || !records_[it->second].generated_text) {
    throw BackendError(BackendError::Kind::kCacheMiss, MissMessage(event, dimension, ""));
  }
  return *records_[it->second].generated_text;
}

double FixtureBackend::WordProb(const std::string &event, Dimension dimension,
                                const std::string &word) const {
  auto it = index_.find({event, dimension});
  if (it != index_.end()) {
    auto w = records_[it->second].word_probs.find(word);
    if (w != records_[it->second].word_probs.end()) return w->second;
  }
  throw BackendError(BackendError::Kind::kCacheMiss, MissMessage(event, dimension, word));
}

std::vector<Json> FixtureToRecords(const std::vector<InferenceRecord> &records) {
  std::vector<Json> out;
  for (const InferenceRecord &r : records) {
    Json j = {{"kind", "inference"},
              {"event", r.event},
              {"dimension", std::string(DimensionName(r.dimension))}};
    if (r.generated_text) j["generated_text"] = *r.generated_text;
    if (!r.word_probs.empty()) j["word_probs"] = r.word_probs;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<InferenceRecord> FixtureFromRecords(const RecordFile &file,
                                                const std::string &origin) {
  std::vector<InferenceRecord> out;
  for (const Json &j : file.records) {
    int lineno = j.value("_line", 0);
    try {
      if (j.at("kind") != "inference") {
        throw ParseError(origin, lineno, "expected inference record");
      }
      InferenceRecord r;
      r.event = j.at("event").get<std::string>();
      auto d = ParseDimension(j.at("dimension").get<std::string>());
      if (!d) throw ParseError(origin, lineno, "unknown dimension");
      r.dimension = *d;
      if (j.contains("generated_text")) r.generated_text = j["generated_text"].get<std::string>();
      if (j.contains("word_probs")) {
        r.word_probs = j["word_probs"].get<std::map<std::string, double>>();
      }
      auto problems = CheckRecord(r);
      if (!problems.empty()) throw ParseError(origin, lineno, problems.front());
      out.push_back(std::move(r));
    } catch (const Json::exception &e) {
      throw ParseError(origin, lineno, std::string("bad inference record: ") + e.what());
    }
  }
  return out;
}

void WriteFixture(const std::string &path, const std::vector<InferenceRecord> &records,
                  const std::string &identity) {
  Json header = {{"kind", "header"}, {"artifact", "fixture"}, {"backend", identity}};
  WriteRecordFile(path, header, FixtureToRecords(records));
}

// ---------------------------------------------------------------------------
// Recording.

std::string RecordingBackend::Generate(const std::string &event, Dimension dimension) const {
  std::string text = inner_.Generate(event, dimension);
  std::lock_guard<std::mutex> lock(mu_);
  InferenceRecord &r = recorded_[{event, dimension}];
  r.event = event;
  r.dimension = dimension;
  r.generated_text = text;
  return text;
}

double RecordingBackend::WordProb(const std::string &event, Dimension dimension,
                                  const std::string &word) const {
  double p = inner_.WordProb(event, dimension, word);
  std::lock_guard<std::mutex> lock(mu_);
  InferenceRecord &r = recorded_[{event, dimension}];
  r.event = event;
  r.dimension = dimension;
  r.word_probs[word] = p;
  return p;
}

std::vector<InferenceRecord> RecordingBackend::Records() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<InferenceRecord> out;
  for (const auto &[key, r] : recorded_) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic oracle.

SyntheticBackend::SyntheticBackend(const EmotionDictionary &dictionary) {
  for (Emotion e : kAllEmotions) word_to_emotion_[dictionary.Word(e)] = e;
}

std::string SyntheticBackend::EventId(const std::string &event) {
  return "[" + Hex64(Fnv1a64(event)) + "]";
}

void SyntheticBackend::AddEvent(const std::string &event, EmotionSet actor_gold,
                                EmotionSet object_gold) {
  Entry &e = by_id_[EventId(event)];
  e.actor = e.actor.Union(actor_gold);
  e.object = e.object.Union(object_gold);
}

SyntheticBackend SyntheticBackend::FromCorpus(const Corpus &corpus,
                                              const std::vector<RoleAssignment> &roles,
                                              const EmotionDictionary &dictionary) {
  SyntheticBackend backend(dictionary);
  auto gold = corpus.GoldIndex();
  for (const RoleAssignment &r : roles) {
    const Story *story = corpus.FindStory(r.story_id);
    if (story == nullptr || r.line_index < 0 ||
        r.line_index >= static_cast<int>(story->lines.size())) {
      continue;
    }
    EmotionSet g;
    auto it = gold.find(r.Key());
    if (it != gold.end()) g = it->second->gold;
    const std::string &event = story->lines[r.line_index].EventText();
    if (r.role == Role::kActor) {
      backend.AddEvent(event, g, {});
    } else {
      backend.AddEvent(event, {}, g);
    }
  }
  return backend;
}

std::string SyntheticBackend::Generate(const std::string &event, Dimension dimension) const {
  if (event.empty()) {
    throw BackendError(BackendError::Kind::kProtocol, "empty event");
  }
  return EventId(event) + " " + std::string(DimensionName(dimension));
}

double SyntheticBackend::WordProb(const std::string &event, Dimension dimension,
                                  const std::string &word) const {
  std::string id;
  bool actor_side = IsActorSide(dimension);
  // Generated phrase: "[<id>] <dimension>".
  if (event.size() > 19 && event.front() == '[' && event[17] == ']' && event[18] == ' ') {
    auto d = ParseDimension(std::string_view(event).substr(19));
    if (d) {
      id = event.substr(0, 18);
      actor_side = IsActorSide(*d);
    }
  }
  if (id.empty()) id = EventId(event);

  auto w = word_to_emotion_.find(word);
  auto entry = by_id_.find(id);
  if (w == word_to_emotion_.end() || entry == by_id_.end()) return kBackground;
  const EmotionSet &gold = actor_side ? entry->second.actor : entry->second.object;
  if (!gold.Contains(w->second)) return kBackground;
  return kGoldMass / gold.Size();
}

// ---------------------------------------------------------------------------
// Cache.

namespace {

Json CacheRecord(const InferenceCache::Key &key, const InferenceCache::Value &value) {
  Json j = {{"kind", "cache"},
            {"backend", key.backend},
            {"op", key.op},
            {"event", key.event},
            {"dimension", key.dimension}};
  if (!key.word.empty()) j["word"] = key.word;
  if (std::holds_alternative<std::string>(value)) {
    j["generated_text"] = std::get<std::string>(value);
  } else {
    j["prob"] = std::get<double>(value);
  }
  return j;
}

std::string Checksum(const Json &record) { return Hex64(Fnv1a64(DumpRecord(record))); }

}  // namespace

InferenceCache::InferenceCache(const std::string &path) : path_(path) {
  if (path_.empty()) return;
  std::ifstream in(path_, std::ios::binary);
  if (in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (Trim(line).empty()) continue;
      std::string locus = path_ + ":" + std::to_string(lineno);
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error &) {
        throw IntegrityError("corrupted cache record at " + locus);
      }
      try {
        if (!j.is_object() || j.value("kind", "") != "cache") {
          throw IntegrityError("unexpected record at " + locus);
        }
        std::string check = j.at("check").get<std::string>();
        j.erase("check");
        if (Checksum(j) != check) throw IntegrityError("checksum mismatch at " + locus);
        Key key{j.at("backend").get<std::string>(), j.at("op").get<std::string>(),
                j.at("event").get<std::string>(), j.at("dimension").get<std::string>(),
                j.value("word", "")};
        if (j.contains("generated_text")) {
          entries_[key] = j["generated_text"].get<std::string>();
        } else {
          entries_[key] = j.at("prob").get<double>();
        }
      } catch (const Json::exception &) {
        throw IntegrityError("malformed cache record at " + locus);
      }
    }
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open cache " + path_);
}

std::optional<InferenceCache::Value> InferenceCache::Get(const Key &key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void InferenceCache::Put(const Key &key, const Value &value) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it != entries_.end() && it->second == value) return;
  entries_[key] = value;
  if (!out_.is_open()) return;
  Json record = CacheRecord(key, value);
  record["check"] = Checksum(record);
  out_ << DumpRecord(record) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("cache write failed: " + path_);
}

size_t InferenceCache::Size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::string CachingBackend::Generate(const std::string &event, Dimension dimension) const {
  InferenceCache::Key key{identity_, "generate", event, std::string(DimensionName(dimension)), ""};
  if (auto v = cache_.Get(key); v && std::holds_alternative<std::string>(*v)) {
    ++hits_;
    return std::get<std::string>(*v);
  }
  ++misses_;
  std::string text = inner_.Generate(event, dimension);
  cache_.Put(key, text);
  return text;
}

double CachingBackend::WordProb(const std::string &event, Dimension dimension,
                                const std::string &word) const {
  InferenceCache::Key key{identity_, "word_prob", event, std::string(DimensionName(dimension)),
                          word};
  if (auto v = cache_.Get(key); v && std::holds_alternative<double>(*v)) {
    ++hits_;
    return std::get<double>(*v);
  }
  ++misses_;
  double p = inner_.WordProb(event, dimension, word);
  cache_.Put(key, p);
  return p;
}

}  // namespace emotrack
