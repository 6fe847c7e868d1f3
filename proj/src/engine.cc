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

#include "emotrack/engine.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "emotrack/text.h"

namespace emotrack {

// ---------------------------------------------------------------------------
// Dictionary.

EmotionDictionary EmotionDictionary::Default() {
  EmotionDictionary d;
  d.words_ = {"surprised", "disgusted", "sad",      "happy",
              "angry",     "fearful",   "trusting", "excited"};
  return d;
}

EmotionDictionary EmotionDictionary::FromJson(const Json &overrides) {
  EmotionDictionary d = Default();
  if (overrides.is_null()) return d;
  if (!overrides.is_object()) throw ConfigError("dictionary must be an object");
  for (auto &[name, word] : overrides.items()) {
    auto e = ParseEmotion(name);
    if (!e) throw ConfigError("dictionary names unknown emotion " + name);
    if (!word.is_string() || word.get<std::string>().empty()) {
      throw ConfigError("dictionary word for " + name + " must be a non-empty string");
    }
    d.words_[Index(*e)] = word.get<std::string>();
  }
  std::set<std::string> seen(d.words_.begin(), d.words_.end());
  if (seen.size() != d.words_.size()) throw ConfigError("dictionary words must be distinct");
  return d;
}

Json EmotionDictionary::ToJson() const {
  Json j = Json::object();
  for (Emotion e : kAllEmotions) j[std::string(EmotionName(e))] = Word(e);
  return j;
}

// ---------------------------------------------------------------------------
// Inference sets.

namespace {

constexpr std::array<std::string_view, 8> kProvenanceNames = {
    "raw_event",     "xIntent",       "xReact_text",  "oReact_text",
    "prev_xEffect",  "prev_oEffect",  "cur_xEffect",  "cur_oEffect",
};

}  // namespace

std::string_view ProvenanceName(Provenance p) {
  return kProvenanceNames[static_cast<int>(p)];
}

std::optional<Provenance> ParseProvenance(std::string_view name) {
  for (size_t i = 0; i < kProvenanceNames.size(); ++i) {
    if (kProvenanceNames[i] == name) return static_cast<Provenance>(i);
  }
  return std::nullopt;
}

InferenceSet BuildInferenceSet(const Story &story, int line, Role role,
                               std::optional<Role> previous_role,
                               const InferenceBackend &backend,
                               const InferenceOptions &options) {
  if (line < 0 || line >= static_cast<int>(story.lines.size())) {
    throw std::out_of_range("story " + story.story_id + " has no line " + std::to_string(line));
  }
  const std::string &event = story.lines[line].EventText();
  InferenceSet set;
  set.elements.push_back({event, Provenance::kRawEvent});
  if (role == Role::kActor) {
    set.elements.push_back({backend.Generate(event, Dimension::kXIntent), Provenance::kXIntent});
    set.elements.push_back({backend.Generate(event, Dimension::kXReact), Provenance::kXReactText});
  } else {
    set.elements.push_back({backend.Generate(event, Dimension::kOReact), Provenance::kOReactText});
  }
  if (line > 0 && previous_role) {
    const std::string &previous = story.lines[line - 1].EventText();
    if (*previous_role == Role::kActor) {
      set.elements.push_back(
          {backend.Generate(previous, Dimension::kXEffect), Provenance::kPrevXEffect});
    } else {
      set.elements.push_back(
          {backend.Generate(previous, Dimension::kOEffect), Provenance::kPrevOEffect});
    }
  }
  if (options.include_current_effect) {
    if (role == Role::kActor) {
      set.elements.push_back({backend.Generate(event, Dimension::kXEffect), Provenance::kCurXEffect});
    } else {
      set.elements.push_back({backend.Generate(event, Dimension::kOEffect), Provenance::kCurOEffect});
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Scoring.

double GeometricMean(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("geometric mean of an empty set");
  double lo = 1.0;
  double hi = 0.0;
  double log_sum = 0.0;
  bool zero = false;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p);
    }
  }
  if (zero) return 0.0;
  double g = std::exp(log_sum / static_cast<double>(probs.size()));
  return std::clamp(g, lo, hi);
}

double ScoreEmotion(const InferenceSet &set, Role role, Emotion emotion,
                    const EmotionDictionary &dictionary, const InferenceBackend &backend,
                    double floor) {
  std::vector<double> probs;
  probs.reserve(set.Size());
  for (const InferenceElement &e : set.elements) {
    double p = ReactWordProb(backend, e.text, role, dictionary.Word(emotion));
    if (floor > 0.0) p = std::max(p, floor);
    probs.push_back(p);
  }
  return GeometricMean(probs);
}

EmotionScores ScoreAllEmotions(const InferenceSet &set, Role role,
                               const EmotionDictionary &dictionary,
                               const InferenceBackend &backend, double floor) {
  EmotionScores scores{};
  for (Emotion e : kAllEmotions) {
    scores[Index(e)] = ScoreEmotion(set, role, e, dictionary, backend, floor);
  }
  return scores;
}

const ScoreEntry *ScoreTable::Find(const PairKey &key) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const ScoreEntry &e, const PairKey &k) { return e.key < k; });
  if (it == entries.end() || it->key != key) return nullptr;
  return &*it;
}

// ---------------------------------------------------------------------------
// Thresholds.

std::string_view CalibrationModeName(CalibrationMode m) {
  switch (m) {
    case CalibrationMode::kFixed: return "fixed";
    case CalibrationMode::kZeroShot: return "zero-shot";
    case CalibrationMode::kFewShot: return "few-shot";
  }
  return "fixed";
}

std::string_view QuantileModeName(QuantileMode m) {
  return m == QuantileMode::kComplement ? "complement" : "literal";
}

CalibrationMode ParseCalibrationMode(std::string_view name) {
  std::string n = ToLower(Trim(name));
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "zero-shot") return CalibrationMode::kZeroShot;
  if (n == "few-shot" || n == "one-shot") return CalibrationMode::kFewShot;
  if (n == "fixed") return CalibrationMode::kFixed;
  throw ConfigError("unknown calibration mode: " + std::string(name));
}

QuantileMode ParseQuantileMode(std::string_view name) {
  std::string n = ToLower(Trim(name));
  if (n == "complement") return QuantileMode::kComplement;
  if (n == "literal") return QuantileMode::kLiteral;
  throw ConfigError("unknown quantile mode: " + std::string(name));
}

ThresholdSet ThresholdSet::Uniform(double k) {
  ThresholdSet t;
  for (Role r : kAllRoles) {
    for (Emotion e : kAllEmotions) t.Set(e, r, k);
  }
  return t;
}

void ThresholdSet::Set(Emotion e, Role r, double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw ConfigError("threshold outside [0,1]");
  k_[static_cast<int>(r)][Index(e)] = k;
}

EmotionSet Classify(const EmotionScores &scores, const ThresholdSet &thresholds, Role role) {
  EmotionSet out;
  for (Emotion e : kAllEmotions) {
    if (scores[Index(e)] > thresholds.Get(e, role)) out.Insert(e);
  }
  return out;
}

std::vector<TrainingPair> TrainingPairs(const ScoreTable &scores, const Corpus &corpus,
                                        const std::string &split) {
  auto gold = corpus.GoldIndex();
  std::set<std::string> selected;
  for (const Story &s : corpus.stories) {
    if (split.empty() || s.split == split) selected.insert(s.story_id);
  }
  std::vector<TrainingPair> pairs;
  for (const ScoreEntry &e : scores.entries) {
    if (!selected.count(e.key.story_id)) continue;
    auto it = gold.find(e.key);
    if (it == gold.end()) continue;
    pairs.push_back({e.role, e.scores, it->second->gold});
  }
  return pairs;
}

FrequencyTable FrequencyTable::Published() {
  FrequencyTable t;
  const double actors[kNumEmotions] = {38.8, 18.3, 25.2, 53.0, 19.3, 26.3, 34.1, 56.4};
  const double objects[kNumEmotions] = {32.6, 13.6, 19.9, 33.4, 15.1, 20.1, 24.0, 33.7};
  for (Emotion e : kAllEmotions) {
    t.Set(e, Role::kActor, actors[Index(e)]);
    t.Set(e, Role::kObject, objects[Index(e)]);
  }
  return t;
}

FrequencyTable FrequencyTable::Observed(const std::vector<TrainingPair> &pairs) {
  FrequencyTable t;
  std::array<int, kNumRoles> totals{};
  std::array<std::array<int, kNumEmotions>, kNumRoles> counts{};
  for (const TrainingPair &p : pairs) {
    int r = static_cast<int>(p.role);
    ++totals[r];
    for (Emotion e : p.gold.Members()) ++counts[r][Index(e)];
  }
  for (Role role : kAllRoles) {
    int r = static_cast<int>(role);
    for (Emotion e : kAllEmotions) {
      t.Set(e, role, totals[r] == 0 ? 0.0 : 100.0 * counts[r][Index(e)] / totals[r]);
    }
  }
  return t;
}

Json FrequencyTable::ToJson() const {
  Json j = Json::object();
  for (Role r : kAllRoles) {
    Json row = Json::object();
    for (Emotion e : kAllEmotions) row[std::string(EmotionName(e))] = Get(e, r);
    j[std::string(RoleName(r))] = row;
  }
  return j;
}

double NearestRankPercentile(std::span<const double> sorted, double pct) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
  const auto n = static_cast<long>(sorted.size());
  // Rounding guard: 50% of 4 must give rank 2, not 3 from 2.0000000001.
  long rank = static_cast<long>(std::ceil(pct / 100.0 * static_cast<double>(n) - 1e-9));
  rank = std::clamp(rank, 1L, n);
  return sorted[rank - 1];
}

ThresholdSet CalibrateZeroShot(const std::vector<TrainingPair> &pairs,
                               const FrequencyTable &frequencies, QuantileMode mode) {
  ThresholdSet t;
  t.mode = CalibrationMode::kZeroShot;
  for (Role role : kAllRoles) {
    for (Emotion e : kAllEmotions) {
      double q = frequencies.Get(e, role);
      if (!(q > 0.0 && q < 100.0)) {
        throw ConfigError("frequency of " + std::string(EmotionName(e)) + " for " +
                          std::string(RoleName(role)) + " is outside (0,100)");
      }
      std::vector<double> scores;
      for (const TrainingPair &p : pairs) {
        if (p.role == role) scores.push_back(p.scores[Index(e)]);
      }
      if (scores.empty()) {
        throw ConfigError("no calibration pairs for role " + std::string(RoleName(role)));
      }
      std::sort(scores.begin(), scores.end());
      double pct = mode == QuantileMode::kComplement ? 100.0 - q : q;
      t.Set(e, role, NearestRankPercentile(scores, pct));
    }
  }
  t.provenance = {{"method", "nearest-rank percentile"},
                  {"quantile", std::string(QuantileModeName(mode))},
                  {"frequencies", frequencies.ToJson()},
                  {"pairs", pairs.size()}};
  return t;
}

std::vector<double> DefaultGrid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(std::pow(10.0, -5.0 + i / 5.0));
  grid.push_back(0.2);
  grid.push_back(0.5);
  grid.push_back(0.9);
  return grid;
}

ThresholdSet CalibrateFewShot(const std::vector<TrainingPair> &pairs,
                              std::vector<double> grid) {
  if (grid.empty()) throw ConfigError("threshold grid is empty");
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("grid value outside [0,1]");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  ThresholdSet t;
  t.mode = CalibrationMode::kFewShot;
  for (Role role : kAllRoles) {
    for (Emotion e : kAllEmotions) {
      // F1 = 2TP / (2TP + FP + FN), compared as exact fractions.
      long best_num = -1;
      long best_den = 1;
      double best_k = grid.front();
      for (double g : grid) {
        long tp = 0, fp = 0, fn = 0;
        for (const TrainingPair &p : pairs) {
          if (p.role != role) continue;
          bool predicted = p.scores[Index(e)] > g;
          bool actual = p.gold.Contains(e);
          tp += predicted && actual;
          fp += predicted && !actual;
          fn += !predicted && actual;
        }
        long num = 2 * tp;
        long den = 2 * tp + fp + fn;
        if (den == 0) {
          num = 0;
          den = 1;
        }
        if (num * best_den > best_num * den) {
          best_num = num;
          best_den = den;
          best_k = g;
        }
      }
      t.Set(e, role, best_k);
    }
  }
  t.provenance = {{"method", "grid sweep, lowest maximizer of per-(emotion, role) F1"},
                  {"grid", grid},
                  {"pairs", pairs.size()}};
  return t;
}

// ---------------------------------------------------------------------------
// Pipeline.

ScoringResult ScorePairs(const Corpus &corpus, const std::vector<RoleAssignment> &roles,
                         const InferenceBackend &backend,
                         const EmotionDictionary &dictionary,
                         const PipelineOptions &options) {
  std::vector<RoleAssignment> jobs = roles;
  std::sort(jobs.begin(), jobs.end(),
            [](const RoleAssignment &a, const RoleAssignment &b) { return a.Key() < b.Key(); });
  std::map<PairKey, Role> role_of;
  std::vector<const Story *> stories;
  for (const RoleAssignment &r : jobs) {
    role_of[r.Key()] = r.role;
    const Story *s = corpus.FindStory(r.story_id);
    if (s == nullptr || r.line_index < 0 ||
        r.line_index >= static_cast<int>(s->lines.size())) {
      throw ValidationError("role assignment references unknown event " + ToString(r.Key()));
    }
    stories.push_back(s);
  }

  std::vector<std::optional<ScoreEntry>> entries(jobs.size());
  std::vector<std::optional<PairFailure>> failures(jobs.size());
  std::atomic<size_t> next{0};

  auto work = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      const RoleAssignment &job = jobs[i];
      std::optional<Role> previous;
      if (job.line_index > 0) {
        auto it = role_of.find({job.story_id, job.line_index - 1, job.character});
        if (it != role_of.end()) previous = it->second;
      }
      try {
        ScoreEntry entry;
        entry.key = job.Key();
        entry.role = job.role;
        entry.inference_set = BuildInferenceSet(*stories[i], job.line_index, job.role,
                                                previous, backend, options.inference);
        entry.scores = ScoreAllEmotions(entry.inference_set, job.role, dictionary, backend,
                                        options.floor);
        entries[i] = std::move(entry);
      } catch (const BackendError &e) {
        failures[i] = PairFailure{job.Key(), e.kind(),
                                  "line " + std::to_string(job.line_index) + ", " +
                                      job.character + ": " + e.what()};
      } catch (const std::invalid_argument &e) {
        failures[i] = PairFailure{job.Key(), BackendError::Kind::kProtocol,
                                  "line " + std::to_string(job.line_index) + ", " +
                                      job.character + ": " + e.what()};
      }
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  ScoringResult result;
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (entries[i]) result.table.entries.push_back(std::move(*entries[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  return result;
}

std::vector<Prediction> ClassifyAll(const ScoreTable &scores, const ThresholdSet &thresholds) {
  std::vector<Prediction> out;
  out.reserve(scores.entries.size());
  for (const ScoreEntry &e : scores.entries) {
    out.push_back({e.key, e.role, Classify(e.scores, thresholds, e.role)});
  }
  return out;
}

PipelineRun RunPipeline(const Corpus &corpus, const std::vector<RoleAssignment> &roles,
                        const InferenceBackend &backend,
                        const EmotionDictionary &dictionary,
                        const ThresholdSet &thresholds, const PipelineOptions &options) {
  PipelineRun run;
  run.scoring = ScorePairs(corpus, roles, backend, dictionary, options);
  run.predictions = ClassifyAll(run.scoring.table, thresholds);
  return run;
}

// ---------------------------------------------------------------------------
// Persistence.

namespace {

Json KeyFields(const PairKey &key) {
  return {{"story_id", key.story_id}, {"line_index", key.line}, {"character", key.character}};
}

PairKey KeyFrom(const Json &j) {
  return {j.at("story_id").get<std::string>(), j.at("line_index").get<int>(),
          j.at("character").get<std::string>()};
}

Role RoleFrom(const Json &j, const std::string &origin, int lineno) {
  auto r = ParseRole(j.at("role").get<std::string>());
  if (!r) throw ParseError(origin, lineno, "unknown role");
  return *r;
}

template <typename Fn>
void ForEachRecord(const RecordFile &file, const std::string &origin, const char *kind,
                   Fn fn) {
  for (const Json &j : file.records) {
    int lineno = j.value("_line", 0);
    try {
      if (j.at("kind") != kind) {
        throw ParseError(origin, lineno, std::string("expected ") + kind + " record");
      }
      fn(j, lineno);
    } catch (const Json::exception &e) {
      throw ParseError(origin, lineno, std::string("bad ") + kind + " record: " + e.what());
    }
  }
}

std::string_view FailureKindName(BackendError::Kind k) {
  switch (k) {
    case BackendError::Kind::kCacheMiss: return "cache_miss";
    case BackendError::Kind::kTransport: return "transport";
    case BackendError::Kind::kProtocol: return "protocol";
  }
  return "transport";
}

}  // namespace

std::vector<Json> ScoresToRecords(const ScoreTable &table) {
  std::vector<Json> out;
  for (const ScoreEntry &e : table.entries) {
    Json j = KeyFields(e.key);
    j["kind"] = "score";
    j["role"] = std::string(RoleName(e.role));
    Json scores = Json::object();
    for (Emotion em : kAllEmotions) scores[std::string(EmotionName(em))] = e.scores[Index(em)];
    j["scores"] = scores;
    Json set = Json::array();
    for (const InferenceElement &el : e.inference_set.elements) {
      set.push_back({{"source", std::string(ProvenanceName(el.provenance))}, {"text", el.text}});
    }
    j["inference_set"] = set;
    out.push_back(std::move(j));
  }
  return out;
}

ScoreTable ScoresFromRecords(const RecordFile &file, const std::string &origin) {
  ScoreTable table;
  ForEachRecord(file, origin, "score", [&](const Json &j, int lineno) {
    ScoreEntry e;
    e.key = KeyFrom(j);
    e.role = RoleFrom(j, origin, lineno);
    const Json &scores = j.at("scores");
    for (Emotion em : kAllEmotions) {
      double s = scores.at(std::string(EmotionName(em))).get<double>();
      if (!(s >= 0.0 && s <= 1.0)) throw ParseError(origin, lineno, "score outside [0,1]");
      e.scores[Index(em)] = s;
    }
    for (const Json &el : j.value("inference_set", Json::array())) {
      auto p = ParseProvenance(el.at("source").get<std::string>());
      if (!p) throw ParseError(origin, lineno, "unknown inference source");
      e.inference_set.elements.push_back({el.at("text").get<std::string>(), *p});
    }
    table.entries.push_back(std::move(e));
  });
  std::sort(table.entries.begin(), table.entries.end(),
            [](const ScoreEntry &a, const ScoreEntry &b) { return a.key < b.key; });
  return table;
}

std::vector<Json> FailuresToRecords(const std::vector<PairFailure> &failures) {
  std::vector<Json> out;
  for (const PairFailure &f : failures) {
    Json j = KeyFields(f.key);
    j["kind"] = "failure";
    j["error"] = std::string(FailureKindName(f.kind));
    j["detail"] = f.message;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<PairFailure> FailuresFromRecords(const RecordFile &file,
                                             const std::string &origin) {
  std::vector<PairFailure> out;
  ForEachRecord(file, origin, "failure", [&](const Json &j, int) {
    PairFailure f;
    f.key = KeyFrom(j);
    std::string kind = j.at("error").get<std::string>();
    f.kind = kind == "cache_miss"  ? BackendError::Kind::kCacheMiss
             : kind == "protocol" ? BackendError::Kind::kProtocol
                                   : BackendError::Kind::kTransport;
    f.message = j.value("detail", "");
    out.push_back(std::move(f));
  });
  return out;
}

std::vector<Json> ThresholdsToRecords(const ThresholdSet &thresholds) {
  std::vector<Json> out;
  for (Role r : kAllRoles) {
    for (Emotion e : kAllEmotions) {
      out.push_back({{"kind", "threshold"},
                     {"emotion", std::string(EmotionName(e))},
                     {"role", std::string(RoleName(r))},
                     {"k", thresholds.Get(e, r)}});
    }
  }
  return out;
}

ThresholdSet ThresholdsFromRecords(const RecordFile &file, const std::string &origin) {
  ThresholdSet t;
  if (file.header.is_object()) {
    if (file.header.contains("calibration")) {
      t.mode = ParseCalibrationMode(file.header["calibration"].get<std::string>());
    }
    if (file.header.contains("provenance")) t.provenance = file.header["provenance"];
  }
  std::set<std::pair<int, int>> seen;
  ForEachRecord(file, origin, "threshold", [&](const Json &j, int lineno) {
    auto e = ParseEmotion(j.at("emotion").get<std::string>());
    if (!e) throw ParseError(origin, lineno, "unknown emotion");
    Role r = RoleFrom(j, origin, lineno);
    double k = j.at("k").get<double>();
    if (!(k >= 0.0 && k <= 1.0)) throw ParseError(origin, lineno, "threshold outside [0,1]");
    t.Set(*e, r, k);
    seen.insert({static_cast<int>(r), Index(*e)});
  });
  if (seen.size() != static_cast<size_t>(kNumEmotions * kNumRoles)) {
    throw ParseError(origin, 0, "threshold set is incomplete");
  }
  return t;
}

std::vector<Json> PredictionsToRecords(const std::vector<Prediction> &predictions) {
  std::vector<Json> out;
  for (const Prediction &p : predictions) {
    Json j = KeyFields(p.key);
    j["kind"] = "prediction";
    j["role"] = std::string(RoleName(p.role));
    j["emotions"] = p.emotions.Names();
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<Prediction> PredictionsFromRecords(const RecordFile &file,
                                               const std::string &origin) {
  std::vector<Prediction> out;
  ForEachRecord(file, origin, "prediction", [&](const Json &j, int lineno) {
    Prediction p;
    p.key = KeyFrom(j);
    p.role = RoleFrom(j, origin, lineno);
    try {
      p.emotions = EmotionSet::FromNames(j.at("emotions").get<std::vector<std::string>>());
    } catch (const std::invalid_argument &e) {
      throw ParseError(origin, lineno, e.what());
    }
    out.push_back(std::move(p));
  });
  return out;
}

}  // namespace emotrack
