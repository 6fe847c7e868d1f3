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

#ifndef EMOTRACK_BACKEND_H_
#define EMOTRACK_BACKEND_H_

#include <atomic>
#include <chrono>
#include <compare>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "emotrack/corpus.h"
#include "emotrack/emotion.h"
#include "emotrack/records.h"

namespace emotrack {

class EmotionDictionary;
struct RoleAssignment;

// Commonsense relation types. Only xIntent, xReact, xEffect, oReact and
// oEffect are queried by the engine; the rest are recognized so that
// fixtures and caches holding them still load.
enum class Dimension {
  kXIntent,
  kXNeed,
  kXAttr,
  kXReact,
  kXWant,
  kXEffect,
  kOReact,
  kOWant,
  kOEffect,
};

std::string_view DimensionName(Dimension d);
std::optional<Dimension> ParseDimension(std::string_view name);

// x-prefixed dimensions describe the event's actor, o-prefixed ones the
// other participants.
bool IsActorSide(Dimension d);
Dimension ReactDimension(Role role);   // xReact / oReact
Dimension EffectDimension(Role role);  // xEffect / oEffect

// A commonsense inference model. Implementations must tolerate concurrent
// calls and be deterministic per (event, dimension[, word]).
//
// WordProb returns the probability that the first word of the inference
// for `dimension` is `word`. Words split into several sub-word pieces are
// scored by the backend as the product of the piece conditionals along the
// greedy prefix, so tokenization never leaks through this interface.
//
// Failures are reported as BackendError.
class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;

  // Model name + version; part of every cache key.
  virtual std::string Identity() const = 0;
  virtual std::string Generate(const std::string &event, Dimension dimension) const = 0;
  virtual double WordProb(const std::string &event, Dimension dimension,
                          const std::string &word) const = 0;
};

// Probability of `word` as the reaction of a character with `role`
// (actor -> xReact, object -> oReact).
double ReactWordProb(const InferenceBackend &backend, const std::string &event, Role role,
                     const std::string &word);

// Backend answers for one (event, dimension).
struct InferenceRecord {
  std::string event;
  Dimension dimension = Dimension::kXReact;
  std::optional<std::string> generated_text;
  std::map<std::string, double> word_probs;
};

inline constexpr double kProbSumSlack = 1e-6;

// Range and mass checks: each probability in [0,1], total <= 1 + 1e-6,
// generated text non-empty when present. Returns problems, empty if none.
std::vector<std::string> CheckRecord(const InferenceRecord &record);

// Replays stored answers. Queries without a stored answer fail with a
// cache-miss BackendError naming the event and dimension.
class FixtureBackend : public InferenceBackend {
 public:
  // Records with the same (event, dimension) are merged. Throws ParseError
  // on records that violate CheckRecord.
  explicit FixtureBackend(std::vector<InferenceRecord> records,
                          std::string identity = "fixture");
  static FixtureBackend Read(const std::string &path);

  std::string Identity() const override { return identity_; }
  std::string Generate(const std::string &event, Dimension dimension) const override;
  double WordProb(const std::string &event, Dimension dimension,
                  const std::string &word) const override;

  const std::vector<InferenceRecord> &records() const { return records_; }

 private:
  std::string identity_;
  std::vector<InferenceRecord> records_;
  std::map<std::pair<std::string, Dimension>, size_t> index_;
};

std::vector<Json> FixtureToRecords(const std::vector<InferenceRecord> &records);
std::vector<InferenceRecord> FixtureFromRecords(const RecordFile &file,
                                                const std::string &origin);
void WriteFixture(const std::string &path, const std::vector<InferenceRecord> &records,
                  const std::string &identity);

// Passes queries through to another backend and remembers every answer, so
// that a FixtureBackend can later replay them.
class RecordingBackend : public InferenceBackend {
 public:
  explicit RecordingBackend(const InferenceBackend &inner) : inner_(inner) {}

  std::string Identity() const override { return inner_.Identity(); }
  std::string Generate(const std::string &event, Dimension dimension) const override;
  double WordProb(const std::string &event, Dimension dimension,
                  const std::string &word) const override;

  // Sorted by (event, dimension).
  std::vector<InferenceRecord> Records() const;

 private:
  const InferenceBackend &inner_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::string, Dimension>, InferenceRecord> recorded_;
};

// Oracle whose reaction probabilities are derived from gold labels. A
// registered event carries the gold set of its actor side and of its
// object side. Generated phrases embed the source event's id, so scoring a
// generated phrase looks up the event it came from; x-dimension phrases
// report the actor side, o-dimension phrases the object side. For raw
// events the queried dimension picks the side.
//
// For a side with gold set G, a dictionary word of an emotion in G gets
// 0.9/|G| and every other word 1e-4, which keeps each word distribution
// below unit mass while ranking gold emotions first.
class SyntheticBackend : public InferenceBackend {
 public:
  static constexpr double kGoldMass = 0.9;
  static constexpr double kBackground = 1e-4;

  explicit SyntheticBackend(const EmotionDictionary &dictionary);

  // Gold sets are unioned with any already registered for the event.
  void AddEvent(const std::string &event, EmotionSet actor_gold, EmotionSet object_gold);

  // Registers every line holding a role assignment, taking gold sets from
  // the corpus annotations.
  static SyntheticBackend FromCorpus(const Corpus &corpus,
                                     const std::vector<RoleAssignment> &roles,
                                     const EmotionDictionary &dictionary);

  // "[<16 hex digits>]": FNV-1a of the event text.
  static std::string EventId(const std::string &event);

  std::string Identity() const override { return "synthetic-oracle-v1"; }
  // "[<event id>] <dimension>", e.g. "[9f2c...] xEffect".
  std::string Generate(const std::string &event, Dimension dimension) const override;
  double WordProb(const std::string &event, Dimension dimension,
                  const std::string &word) const override;

 private:
  struct Entry {
    EmotionSet actor;
    EmotionSet object;
  };

  std::map<std::string, Emotion> word_to_emotion_;
  std::map<std::string, Entry> by_id_;
};

// Client for the model adapter's wire protocol (JSON over HTTP POST):
//   request  {"op":"generate"|"word_prob","event":..,"dimension":..,"word":..}
//   response {"generated_text":..} | {"prob":..} | {"error":..,"detail":..}
// Transport failures are retried with exponential backoff.
class RemoteBackend : public InferenceBackend {
 public:
  struct Options {
    std::string base_url;  // scheme://host:port
    std::string path = "/infer";
    std::string health_path = "/health";
    std::string identity;  // empty: ask the health endpoint once
    int retries = 3;
    std::chrono::milliseconds deadline{10000};
    std::chrono::milliseconds backoff{50};
  };

  // Accepts "http://host:port[/path][;id=<identity>]".
  static Options ParseSpec(const std::string &spec);

  explicit RemoteBackend(Options options);

  std::string Identity() const override;
  std::string Generate(const std::string &event, Dimension dimension) const override;
  double WordProb(const std::string &event, Dimension dimension,
                  const std::string &word) const override;

  // Inference requests sent (including retries), excluding health checks.
  long inference_calls() const { return inference_calls_.load(); }

 private:
  Json Call(const Json &request) const;

  Options options_;
  mutable std::atomic<long> inference_calls_{0};
  mutable std::mutex identity_mu_;
  mutable std::string identity_;
};

// Append-only, checksummed store of backend answers that survives process
// restarts. Keys include the backend identity so answers from different
// models never mix.
class InferenceCache {
 public:
  struct Key {
    std::string backend;
    std::string op;  // "generate" or "word_prob"
    std::string event;
    std::string dimension;
    std::string word;  // empty for generate

    auto operator<=>(const Key &) const = default;
  };
  using Value = std::variant<std::string, double>;

  // Loads existing records (throws IntegrityError naming the first bad
  // record) and opens the file for appending. An empty path keeps the
  // cache in memory.
  explicit InferenceCache(const std::string &path);

  std::optional<Value> Get(const Key &key) const;
  void Put(const Key &key, const Value &value);
  size_t Size() const;

  const std::string &path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<Key, Value> entries_;
  std::ofstream out_;
};

// Serves from the cache and fills it on misses. Returned values are the
// same with or without the cache.
class CachingBackend : public InferenceBackend {
 public:
  CachingBackend(const InferenceBackend &inner, InferenceCache &cache)
      : inner_(inner), cache_(cache), identity_(inner.Identity()) {}

  std::string Identity() const override { return identity_; }
  std::string Generate(const std::string &event, Dimension dimension) const override;
  double WordProb(const std::string &event, Dimension dimension,
                  const std::string &word) const override;

  long hits() const { return hits_.load(); }
  long misses() const { return misses_.load(); }

 private:
  const InferenceBackend &inner_;
  InferenceCache &cache_;
  std::string identity_;
  mutable std::atomic<long> hits_{0};
  mutable std::atomic<long> misses_{0};
};

}  // namespace emotrack

#endif  // EMOTRACK_BACKEND_H_
