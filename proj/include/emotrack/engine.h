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

#ifndef EMOTRACK_ENGINE_H_
#define EMOTRACK_ENGINE_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emotrack/backend.h"
#include "emotrack/corpus.h"
#include "emotrack/emotion.h"
#include "emotrack/errors.h"
#include "emotrack/records.h"
#include "emotrack/roles.h"

namespace emotrack {

// Emotion -> vocabulary word whose first-word reaction probability stands
// in for the emotion.
class EmotionDictionary {
 public:
  // surprised, disgusted, sad, happy, angry, fearful, trusting, excited.
  static EmotionDictionary Default();
  // Overrides entries of the default map. Throws ConfigError on unknown
  // emotions or duplicate words.
  static EmotionDictionary FromJson(const Json &overrides);
  Json ToJson() const;

  const std::string &Word(Emotion e) const { return words_[Index(e)]; }

 private:
  std::array<std::string, kNumEmotions> words_;
};

// ---------------------------------------------------------------------------
// Inference sets.

enum class Provenance {
  kRawEvent,
  kXIntent,
  kXReactText,
  kOReactText,
  kPrevXEffect,
  kPrevOEffect,
  kCurXEffect,  // only with include_current_effect
  kCurOEffect,
};

std::string_view ProvenanceName(Provenance p);
std::optional<Provenance> ParseProvenance(std::string_view name);

struct InferenceElement {
  std::string text;
  Provenance provenance = Provenance::kRawEvent;

  friend bool operator==(const InferenceElement &, const InferenceElement &) = default;
};

struct InferenceSet {
  std::vector<InferenceElement> elements;

  size_t Size() const { return elements.size(); }
  friend bool operator==(const InferenceSet &, const InferenceSet &) = default;
};

struct InferenceOptions {
  // Also append the current line's own effect inference.
  bool include_current_effect = false;
};

// Actor:  {s_t, xIntent(s_t), xReact(s_t)}
// Object: {s_t, oReact(s_t)}
// When the character held role r' in line t-1, the effect of s_{t-1} for r'
// (xEffect for actors, oEffect for objects) is appended. Line 0 never gets
// an effect element.
InferenceSet BuildInferenceSet(const Story &story, int line, Role role,
                               std::optional<Role> previous_role,
                               const InferenceBackend &backend,
                               const InferenceOptions &options = {});

// ---------------------------------------------------------------------------
// Scoring.

// (prod p)^(1/n). Zero if any p is zero; clamped to [min p, max p] so the
// bound holds in floating point. Throws std::invalid_argument on an empty
// input or a probability outside [0,1].
double GeometricMean(std::span<const double> probs);

// Geometric mean over the set of the reaction probability of the emotion's
// dictionary word. `floor` > 0 raises each probability to at least floor.
double ScoreEmotion(const InferenceSet &set, Role role, Emotion emotion,
                    const EmotionDictionary &dictionary, const InferenceBackend &backend,
                    double floor = 0.0);

using EmotionScores = std::array<double, kNumEmotions>;

EmotionScores ScoreAllEmotions(const InferenceSet &set, Role role,
                               const EmotionDictionary &dictionary,
                               const InferenceBackend &backend, double floor = 0.0);

struct ScoreEntry {
  PairKey key;
  Role role = Role::kActor;
  EmotionScores scores{};
  InferenceSet inference_set;

  friend bool operator==(const ScoreEntry &, const ScoreEntry &) = default;
};

// Scores for every scored event-character pair, sorted by key.
struct ScoreTable {
  std::vector<ScoreEntry> entries;

  const ScoreEntry *Find(const PairKey &key) const;
};

// ---------------------------------------------------------------------------
// Thresholds and classification.

enum class CalibrationMode { kFixed, kZeroShot, kFewShot };
enum class QuantileMode { kComplement, kLiteral };

std::string_view CalibrationModeName(CalibrationMode m);
std::string_view QuantileModeName(QuantileMode m);
// Accept "zero-shot"/"zero_shot", "few-shot"/"few_shot", "fixed".
CalibrationMode ParseCalibrationMode(std::string_view name);
QuantileMode ParseQuantileMode(std::string_view name);

class ThresholdSet {
 public:
  static ThresholdSet Uniform(double k);

  double Get(Emotion e, Role r) const { return k_[static_cast<int>(r)][Index(e)]; }
  // Throws ConfigError outside [0,1].
  void Set(Emotion e, Role r, double k);

  CalibrationMode mode = CalibrationMode::kFixed;
  Json provenance = Json::object();

 private:
  std::array<std::array<double, kNumEmotions>, kNumRoles> k_{};
};

// {y : score_y > k_{y,role}}.
EmotionSet Classify(const EmotionScores &scores, const ThresholdSet &thresholds, Role role);

// One labelled pair of the calibration split.
struct TrainingPair {
  Role role = Role::kActor;
  EmotionScores scores{};
  EmotionSet gold;
};

// Joins scores with gold annotations; pairs without gold are skipped.
// An empty split selects every story.
std::vector<TrainingPair> TrainingPairs(const ScoreTable &scores, const Corpus &corpus,
                                        const std::string &split);

// Percent of pairs (per role) whose gold set holds each emotion.
struct FrequencyTable {
  std::array<std::array<double, kNumEmotions>, kNumRoles> percent{};

  double Get(Emotion e, Role r) const { return percent[static_cast<int>(r)][Index(e)]; }
  void Set(Emotion e, Role r, double q) { percent[static_cast<int>(r)][Index(e)] = q; }

  // Relative annotation frequencies observed on the StoryCommonsense
  // training set, actors / objects.
  static FrequencyTable Published();
  static FrequencyTable Observed(const std::vector<TrainingPair> &pairs);
  Json ToJson() const;
};

// Nearest-rank percentile of ascending `sorted`: element ceil(pct/100 * N),
// 1-based, clamped to [1, N]. Throws std::invalid_argument on empty input.
double NearestRankPercentile(std::span<const double> sorted, double pct);

// Complement mode: k = nearest-rank (100 - q)th percentile, so about q% of
// the calibration scores exceed k. Literal mode: k = q-th percentile.
// Throws ConfigError when q is outside (0,100) or a role has no pairs.
ThresholdSet CalibrateZeroShot(const std::vector<TrainingPair> &pairs,
                               const FrequencyTable &frequencies, QuantileMode mode);

// 5 log-spaced points per decade over [1e-5, 1e-1], plus 0.2, 0.5, 0.9.
std::vector<double> DefaultGrid();

// Per (emotion, role): the lowest grid value reaching the maximum F1 over
// the grid, predicting positive when score > k. Throws ConfigError on an
// empty grid or values outside [0,1].
ThresholdSet CalibrateFewShot(const std::vector<TrainingPair> &pairs,
                              std::vector<double> grid);

// ---------------------------------------------------------------------------
// Pipeline.

struct PipelineOptions {
  InferenceOptions inference;
  double floor = 0.0;
  int workers = 1;
};

struct PairFailure {
  PairKey key;
  BackendError::Kind kind = BackendError::Kind::kTransport;
  std::string message;
};

struct ScoringResult {
  ScoreTable table;
  std::vector<PairFailure> failures;  // sorted by key
};

// Builds and scores the inference set of every role assignment. Backend
// errors are collected per pair; the remaining pairs are still scored.
// Results do not depend on the worker count.
ScoringResult ScorePairs(const Corpus &corpus, const std::vector<RoleAssignment> &roles,
                         const InferenceBackend &backend,
                         const EmotionDictionary &dictionary,
                         const PipelineOptions &options);

struct Prediction {
  PairKey key;
  Role role = Role::kActor;
  EmotionSet emotions;

  friend bool operator==(const Prediction &, const Prediction &) = default;
};

std::vector<Prediction> ClassifyAll(const ScoreTable &scores, const ThresholdSet &thresholds);

struct PipelineRun {
  ScoringResult scoring;
  std::vector<Prediction> predictions;
};

PipelineRun RunPipeline(const Corpus &corpus, const std::vector<RoleAssignment> &roles,
                        const InferenceBackend &backend,
                        const EmotionDictionary &dictionary,
                        const ThresholdSet &thresholds, const PipelineOptions &options);

// ---------------------------------------------------------------------------
// Persistence.

std::vector<Json> ScoresToRecords(const ScoreTable &table);
ScoreTable ScoresFromRecords(const RecordFile &file, const std::string &origin);

std::vector<Json> FailuresToRecords(const std::vector<PairFailure> &failures);
std::vector<PairFailure> FailuresFromRecords(const RecordFile &file, const std::string &origin);

std::vector<Json> ThresholdsToRecords(const ThresholdSet &thresholds);
// Throws ParseError unless all 16 (emotion, role) entries are present.
ThresholdSet ThresholdsFromRecords(const RecordFile &file, const std::string &origin);

std::vector<Json> PredictionsToRecords(const std::vector<Prediction> &predictions);
std::vector<Prediction> PredictionsFromRecords(const RecordFile &file,
                                               const std::string &origin);

}  // namespace emotrack

#endif  // EMOTRACK_ENGINE_H_
