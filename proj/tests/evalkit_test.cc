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

#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "emotrack/evalkit.h"

namespace emotrack {
namespace {

TEST_CASE("worked example counts") {
  // Y = {e1, e2, e8}, predicted {e1, e2, e7}.
  EmotionSet gold{Emotion::kSurprise, Emotion::kDisgust, Emotion::kAnticipation};
  EmotionSet pred{Emotion::kSurprise, Emotion::kDisgust, Emotion::kTrust};
  ConfusionCounts c = CountPair(gold, pred);
  CHECK(c == ConfusionCounts{2, 1, 1, 4});
  Metrics m = MicroMetrics(c);
  CHECK(m.precision == 2.0 / 3.0);
  CHECK(m.recall == 2.0 / 3.0);
  CHECK(m.f1 == 2.0 / 3.0);
  CHECK_FALSE(m.degenerate);
  CHECK(CountPair({"surprise", "disgust", "anticipation"}, {"surprise", "disgust", "trust"}) == c);
  CHECK_THROWS_AS(CountPair({"joy"}, {"love"}), std::invalid_argument);
}

TEST_CASE("degenerate metrics") {
  Metrics m = MicroMetrics(ConfusionCounts{0, 0, 0, 8});
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  CHECK(m.degenerate);
  Metrics p = MicroMetrics(ConfusionCounts{0, 3, 0, 5});
  CHECK(p.degenerate);
  CHECK(p.precision == 0.0);
}

TEST_CASE("counts are invariant under relabeling emotions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    EmotionSet g, y, pg, py;
    std::array<int, kNumEmotions> perm;
    for (int i = 0; i < kNumEmotions; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Emotion e : kAllEmotions) {
      Emotion to = kAllEmotions[perm[Index(e)]];
      if (rng() % 2) {
        g.Insert(e);
        pg.Insert(to);
      }
      if (rng() % 2) {
        y.Insert(e);
        py.Insert(to);
      }
    }
    CHECK(CountPair(g, y) == CountPair(pg, py));
  }
}

struct Fixture {
  Corpus corpus;
  std::vector<Prediction> predictions;
};

// Random corpus of `n` annotated pairs; every pair but the absent ones
// gets a prediction.
Fixture RandomRun(uint64_t seed, int n, int absent_every) {
  std::mt19937_64 rng(seed);
  Fixture f;
  Story s;
  s.story_id = "s";
  s.split = "dev";
  for (int i = 0; i < n; ++i) s.lines.push_back({i, "line " + std::to_string(i), ""});
  s.characters = {"A"};
  f.corpus.stories.push_back(s);
  for (int i = 0; i < n; ++i) {
    GoldAnnotation a;
    a.story_id = "s";
    a.line_index = i;
    a.character = "A";
    a.num_annotators = 1;
    for (Emotion e : kAllEmotions) {
      if (rng() % 3 == 0) {
        a.gold.Insert(e);
        a.votes[Index(e)] = 1;
      }
    }
    f.corpus.annotations.push_back(a);
    if (absent_every > 0 && i % absent_every == 0) continue;
    Prediction p;
    p.key = a.Key();
    p.role = rng() % 2 ? Role::kActor : Role::kObject;
    for (Emotion e : kAllEmotions) {
      if (rng() % 3 == 0) p.emotions.Insert(e);
    }
    f.predictions.push_back(p);
  }
  return f;
}

TEST_CASE("micro metrics match a brute-force recount") {
  Fixture f = RandomRun(11, 50, 0);
  EvaluationReport r = Evaluate(f.corpus, f.predictions, {}, {}, Json());
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (size_t i = 0; i < f.predictions.size(); ++i) {
    for (Emotion e : kAllEmotions) {
      bool g = f.corpus.annotations[i].gold.Contains(e);
      bool y = f.predictions[i].emotions.Contains(e);
      tp += g && y;
      fp += !g && y;
      fn += g && !y;
      tn += !g && !y;
    }
  }
  CHECK(r.pairs == 50);
  CHECK(r.overall == ConfusionCounts{tp, fp, fn, tn});
  Metrics m = MicroMetrics(r.overall);
  CHECK(m.precision == static_cast<double>(tp) / (tp + fp));
  CHECK(m.recall == static_cast<double>(tp) / (tp + fn));

  // Order does not matter.
  std::vector<Prediction> reversed(f.predictions.rbegin(), f.predictions.rend());
  CHECK(Evaluate(f.corpus, reversed, {}, {}, Json()).overall == r.overall);

  ConfusionCounts roles;
  for (const ConfusionCounts &c : r.per_role) roles += c;
  CHECK(roles == r.overall);
  ConfusionCounts emotions;
  for (const ConfusionCounts &c : r.per_emotion) emotions += c;
  CHECK(emotions == r.overall);
}

TEST_CASE("absent pairs under both conventions") {
  Fixture f = RandomRun(5, 20, 4);  // lines 0, 4, 8, 12, 16 absent
  EvaluationReport ex = Evaluate(f.corpus, f.predictions, {}, {}, Json());
  CHECK(ex.pairs == 15);
  CHECK(ex.absent_pairs == 5);
  CHECK(ex.overall == ex.overall_scored);
  CHECK(ex.absent.tp == 0);
  CHECK(ex.absent.fp == 0);
  CHECK(ex.absent.Total() == 40);

  EvaluationOptions inc;
  inc.include_absent = true;
  EvaluationReport in = Evaluate(f.corpus, f.predictions, {}, inc, Json());
  CHECK(in.pairs == 20);
  CHECK(in.overall == ex.overall_with_absent);
  CHECK(in.overall.Total() == 160);
  ConfusionCounts emotions;
  for (const ConfusionCounts &c : in.per_emotion) emotions += c;
  CHECK(emotions == in.overall);
}

TEST_CASE("failures and ungolded predictions are excluded and listed") {
  Fixture f = RandomRun(3, 10, 0);
  std::vector<PairFailure> failures = {
      {{"s", 2, "A"}, BackendError::Kind::kTransport, "timeout"},
      {{"s", 5, "A"}, BackendError::Kind::kCacheMiss, "miss"}};
  std::vector<Prediction> preds;
  for (const Prediction &p : f.predictions) {
    if (p.key.line != 2 && p.key.line != 5) preds.push_back(p);
  }
  preds.push_back({{"s", 3, "Ghost"}, Role::kActor, EmotionSet{Emotion::kJoy}});
  EvaluationReport r = Evaluate(f.corpus, preds, failures, {}, {{"backend", "b"}});
  CHECK(r.pairs == 8);
  CHECK(r.exclusions.size() == 3);
  CHECK(r.absent_pairs == 0);

  std::string text = RenderReport(r);
  CHECK(text.find("Exclusions: 3") != std::string::npos);
  CHECK(text.find("published few-shot") != std::string::npos);
  CHECK(text.find("\"backend\": \"b\"") != std::string::npos);

  std::vector<Json> recs = ReportToRecords(r);
  long metrics = std::count_if(recs.begin(), recs.end(),
                               [](const Json &j) { return j["kind"] == "metric"; });
  CHECK(metrics == 16 + 8 + 2 + 3);
  bool few_shot_row = false;
  for (const Json &j : recs) {
    if (j["kind"] == "reference" && j["setting"] == "published few-shot") {
      few_shot_row = j["precision"] == 39.4 && j["recall"] == 81.5 && j["f1"] == 53.1;
    }
  }
  CHECK(few_shot_row);
}

TEST_CASE("split selection") {
  Fixture f = RandomRun(9, 6, 0);
  EvaluationOptions o;
  o.split = "test";
  EvaluationReport r = Evaluate(f.corpus, f.predictions, {}, o, Json());
  CHECK(r.pairs == 0);
  CHECK(r.overall.Total() == 0);
}

}  // namespace
}  // namespace emotrack
