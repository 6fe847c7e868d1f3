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

#include "emotrack/evalkit.h"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace emotrack {

ConfusionCounts CountPair(const EmotionSet &gold, const EmotionSet &predicted) {
  ConfusionCounts c;
  c.tp = gold.Intersect(predicted).Size();
  c.fp = predicted.Minus(gold).Size();
  c.fn = gold.Minus(predicted).Size();
  c.tn = kNumEmotions - c.tp - c.fp - c.fn;
  return c;
}

ConfusionCounts CountPair(const std::vector<std::string> &gold,
                          const std::vector<std::string> &predicted) {
  return CountPair(EmotionSet::FromNames(gold), EmotionSet::FromNames(predicted));
}

Metrics MicroMetrics(const ConfusionCounts &c) {
  Metrics m;
  const long pred = c.tp + c.fp;
  const long real = c.tp + c.fn;
  if (pred == 0 || real == 0) m.degenerate = true;
  m.precision = pred == 0 ? 0.0 : static_cast<double>(c.tp) / pred;
  m.recall = real == 0 ? 0.0 : static_cast<double>(c.tp) / real;
  if (c.tp == 0) {
    m.f1 = 0.0;
  } else {
    m.f1 = 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
  }
  return m;
}

EvaluationReport Evaluate(const Corpus &corpus, const std::vector<Prediction> &predictions,
                          const std::vector<PairFailure> &failures,
                          const EvaluationOptions &options, const Json &config) {
  EvaluationReport report;
  report.options = options;
  report.config = config;

  std::set<std::string> selected;
  for (const Story &s : corpus.stories) {
    if (options.split.empty() || s.split == options.split) selected.insert(s.story_id);
  }
  auto gold = corpus.GoldIndex();
  std::set<PairKey> failed;
  for (const PairFailure &f : failures) {
    if (!selected.count(f.key.story_id)) continue;
    failed.insert(f.key);
    report.exclusions.push_back(ToString(f.key) + ": backend failure: " + f.message);
  }

  std::set<PairKey> predicted;
  for (const Prediction &p : predictions) {
    if (!selected.count(p.key.story_id)) continue;
    predicted.insert(p.key);
    if (failed.count(p.key)) continue;
    auto it = gold.find(p.key);
    if (it == gold.end()) {
      report.exclusions.push_back(ToString(p.key) + ": no gold annotation");
      continue;
    }
    ConfusionCounts c = CountPair(it->second->gold, p.emotions);
    ++report.pairs;
    report.overall += c;
    report.per_role[static_cast<int>(p.role)] += c;
    for (Emotion e : kAllEmotions) {
      ConfusionCounts one;
      bool g = it->second->gold.Contains(e);
      bool y = p.emotions.Contains(e);
      one.tp = g && y;
      one.fp = !g && y;
      one.fn = g && !y;
      one.tn = !g && !y;
      report.per_emotion[Index(e)] += one;
      report.per_emotion_role[static_cast<int>(p.role)][Index(e)] += one;
    }
  }

  for (const auto &[key, annotation] : gold) {
    if (!selected.count(key.story_id) || predicted.count(key) || failed.count(key)) continue;
    ++report.absent_pairs;
    report.absent += CountPair(annotation->gold, EmotionSet());
  }
  report.overall_scored = report.overall;
  report.overall_with_absent = report.overall;
  report.overall_with_absent += report.absent;

  if (options.include_absent) {
    report.pairs += report.absent_pairs;
    report.overall = report.overall_with_absent;
    for (const auto &[key, annotation] : gold) {
      if (!selected.count(key.story_id) || predicted.count(key) || failed.count(key)) continue;
      for (Emotion e : kAllEmotions) {
        ConfusionCounts one;
        if (annotation->gold.Contains(e)) {
          one.fn = 1;
        } else {
          one.tn = 1;
        }
        report.per_emotion[Index(e)] += one;
      }
    }
  }

  if (report.overall.Total() != kNumEmotions * report.pairs) {
    throw std::logic_error("confusion counts do not sum to 8 x pairs");
  }

  double f1_sum = 0.0;
  for (Emotion e : kAllEmotions) f1_sum += MicroMetrics(report.per_emotion[Index(e)]).f1;
  report.macro_f1 = f1_sum / kNumEmotions;
  return report;
}

const std::vector<ReferenceRow> &ReferenceRows() {
  static const std::vector<ReferenceRow> rows = {
      {"published zero-shot", 31.1, 77.4, 44.3},
      {"published few-shot", 39.4, 81.5, 53.1},
  };
  return rows;
}

namespace {

std::string Row(const std::string &label, const ConfusionCounts &c) {
  Metrics m = MicroMetrics(c);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "  %-24s P %6.2f  R %6.2f  F1 %6.2f  (TP %ld FP %ld FN %ld TN %ld)%s\n",
                label.c_str(), 100.0 * m.precision, 100.0 * m.recall, 100.0 * m.f1, c.tp, c.fp,
                c.fn, c.tn, m.degenerate ? "  [degenerate]" : "");
  return buf;
}

Json CountsJson(const ConfusionCounts &c) {
  Metrics m = MicroMetrics(c);
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"tn", c.tn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"degenerate", m.degenerate}};
}

}  // namespace

std::string RenderReport(const EvaluationReport &r) {
  std::ostringstream out;
  out << "Emotion classification report\n";
  out << "convention: pairs without a role record are "
      << (r.options.include_absent ? "counted as predicted-empty" : "excluded") << "\n";
  out << "split: " << (r.options.split.empty() ? "(all)" : r.options.split) << "\n";
  out << "pairs evaluated: " << r.pairs << "  (absent pairs: " << r.absent_pairs << ")\n\n";

  out << "Overall (micro)\n";
  out << Row("primary", r.overall);
  out << Row("excluding absent", r.overall_scored);
  out << Row("including absent", r.overall_with_absent);
  char macro[64];
  std::snprintf(macro, sizeof(macro), "  %-24s F1 %6.2f\n", "macro over emotions", 100.0 * r.macro_f1);
  out << macro << "\n";

  out << "Per emotion\n";
  for (Emotion e : kAllEmotions) out << Row(std::string(EmotionName(e)), r.per_emotion[Index(e)]);
  out << "\nPer role\n";
  for (Role role : kAllRoles) out << Row(std::string(RoleName(role)), r.per_role[static_cast<int>(role)]);
  out << "\nPer emotion and role\n";
  for (Role role : kAllRoles) {
    for (Emotion e : kAllEmotions) {
      out << Row(std::string(EmotionName(e)) + "/" + std::string(RoleName(role)),
                 r.per_emotion_role[static_cast<int>(role)][Index(e)]);
    }
  }

  out << "\nReference results (full dataset, original model)\n";
  for (const ReferenceRow &row : ReferenceRows()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  %-24s P %6.2f  R %6.2f  F1 %6.2f\n", row.setting,
                  row.precision, row.recall, row.f1);
    out << buf;
  }

  out << "\nExclusions: " << r.exclusions.size() << "\n";
  for (const std::string &e : r.exclusions) out << "  " << e << "\n";

  out << "\nConfiguration\n" << r.config.dump(2) << "\n";
  return out.str();
}

std::vector<Json> ReportToRecords(const EvaluationReport &r) {
  std::vector<Json> out;
  auto add = [&](const std::string &scope, const std::string &emotion, const std::string &role,
                 const ConfusionCounts &c) {
    Json j = CountsJson(c);
    j["kind"] = "metric";
    j["scope"] = scope;
    if (!emotion.empty()) j["emotion"] = emotion;
    if (!role.empty()) j["role"] = role;
    out.push_back(std::move(j));
  };
  for (Role role : kAllRoles) {
    for (Emotion e : kAllEmotions) {
      add("emotion_role", std::string(EmotionName(e)), std::string(RoleName(role)),
          r.per_emotion_role[static_cast<int>(role)][Index(e)]);
    }
  }
  for (Emotion e : kAllEmotions) add("emotion", std::string(EmotionName(e)), "", r.per_emotion[Index(e)]);
  for (Role role : kAllRoles) add("role", "", std::string(RoleName(role)), r.per_role[static_cast<int>(role)]);
  add("total", "", "", r.overall);
  add("total_excluding_absent", "", "", r.overall_scored);
  add("total_including_absent", "", "", r.overall_with_absent);
  Json summary = {{"kind", "summary"},
                  {"pairs", r.pairs},
                  {"absent_pairs", r.absent_pairs},
                  {"include_absent", r.options.include_absent},
                  {"macro_f1", r.macro_f1},
                  {"exclusions", r.exclusions}};
  out.push_back(std::move(summary));
  for (const ReferenceRow &row : ReferenceRows()) {
    out.push_back({{"kind", "reference"},
                   {"setting", row.setting},
                   {"precision", row.precision},
                   {"recall", row.recall},
                   {"f1", row.f1}});
  }
  return out;
}

}  // namespace emotrack
