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

#ifndef EMOTRACK_EVALKIT_H_
#define EMOTRACK_EVALKIT_H_

#include <array>
#include <string>
#include <vector>

#include "emotrack/corpus.h"
#include "emotrack/emotion.h"
#include "emotrack/engine.h"
#include "emotrack/records.h"

namespace emotrack {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long Total() const { return tp + fp + fn + tn; }
  ConfusionCounts &operator+=(const ConfusionCounts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

// Counts over the eight emotions of one event-character pair.
ConfusionCounts CountPair(const EmotionSet &gold, const EmotionSet &predicted);
// Same, from label names; throws std::invalid_argument on a name outside
// the eight emotions.
ConfusionCounts CountPair(const std::vector<std::string> &gold,
                          const std::vector<std::string> &predicted);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some denominator was zero and reported as 0
};

Metrics MicroMetrics(const ConfusionCounts &counts);

struct EvaluationOptions {
  // Count annotated pairs without a role record as predicted-empty instead
  // of excluding them.
  bool include_absent = false;
  std::string split;  // empty: all stories
};

struct EvaluationReport {
  EvaluationOptions options;
  Json config;  // echoed verbatim

  long pairs = 0;         // pairs in the primary totals
  long absent_pairs = 0;  // annotated pairs with no role record
  ConfusionCounts overall;              // primary totals, per the convention
  ConfusionCounts overall_scored;       // pairs with a prediction only
  ConfusionCounts overall_with_absent;  // scored plus absent pairs
  std::array<ConfusionCounts, kNumEmotions> per_emotion{};
  std::array<ConfusionCounts, kNumRoles> per_role{};
  std::array<std::array<ConfusionCounts, kNumEmotions>, kNumRoles> per_emotion_role{};
  ConfusionCounts absent;  // the absent pairs alone
  double macro_f1 = 0.0;

  std::vector<std::string> exclusions;
};

// Joins predictions with gold. Predictions without gold and pairs listed in
// `failures` are excluded and listed. Checks TP+FP+FN+TN = 8 x pairs and
// throws std::logic_error if it does not hold.
EvaluationReport Evaluate(const Corpus &corpus, const std::vector<Prediction> &predictions,
                          const std::vector<PairFailure> &failures,
                          const EvaluationOptions &options, const Json &config);

// Published reference results, printed as comparison rows.
struct ReferenceRow {
  const char *setting;
  double precision;
  double recall;
  double f1;
};
const std::vector<ReferenceRow> &ReferenceRows();

std::string RenderReport(const EvaluationReport &report);
// One record per (emotion, role), per emotion, per role, plus totals.
std::vector<Json> ReportToRecords(const EvaluationReport &report);

}  // namespace emotrack

#endif  // EMOTRACK_EVALKIT_H_
