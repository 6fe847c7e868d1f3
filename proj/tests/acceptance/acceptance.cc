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

// Acceptance suite: one PASS/FAIL line per primary criterion. Every check
// compares the library against an oracle coded independently here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "emotrack/coref.h"
#include "emotrack/engine.h"
#include "emotrack/evalkit.h"
#include "emotrack/stages.h"
#include "emotrack/synthetic.h"
#include "../testing.h"

namespace emotrack {
namespace {

using testing::FakeAdapter;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Report(const char *name, double budget_s, const std::function<Outcome()> &check) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception &e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(budget_s)) + "s budget";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-32s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string Fmt(const char *format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome MetricsWorkedExample() {
  // Y = {e1, e2, e8}, Y^ = {e1, e2, e7} with e_i the i-th emotion.
  EmotionSet gold{kAllEmotions[0], kAllEmotions[1], kAllEmotions[7]};
  EmotionSet pred{kAllEmotions[0], kAllEmotions[1], kAllEmotions[6]};
  ConfusionCounts c = CountPair(gold, pred);
  Metrics m = MicroMetrics(c);
  bool ok = c.tp == 2 && c.fp == 1 && c.fn == 1 && c.tn == 4 && m.precision == 2.0 / 3.0 &&
            m.recall == 2.0 / 3.0 && m.f1 == 2.0 / 3.0;
  std::ostringstream d;
  d << "TP=" << c.tp << " FP=" << c.fp << " FN=" << c.fn << " TN=" << c.tn << " P=R=F1="
    << m.f1;
  return {ok, d.str()};
}

Outcome GeometricMeanProperties() {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const EmotionDictionary dict = EmotionDictionary::Default();
  const std::string word = dict.Word(Emotion::kJoy);
  int bad_bounds = 0, bad_perm = 0, bad_fixed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    std::vector<InferenceRecord> records;
    InferenceSet set;
    std::vector<double> probs;
    for (int i = 0; i < n; ++i) {
      // Mix ordinary, tiny and occasional zero probabilities.
      double p = unit(rng);
      if (rng() % 4 == 0) p = std::pow(10.0, -1 - 6 * unit(rng));
      if (rng() % 50 == 0) p = 0.0;
      std::string text = "event " + std::to_string(trial) + "." + std::to_string(i);
      records.push_back({text, Dimension::kXReact, std::nullopt, {{word, p}}});
      set.elements.push_back({text, i == 0 ? Provenance::kRawEvent : Provenance::kXIntent});
      probs.push_back(p);
    }
    FixtureBackend backend(records);
    double s = ScoreEmotion(set, Role::kActor, Emotion::kJoy, dict, backend);
    double lo = *std::min_element(probs.begin(), probs.end());
    double hi = *std::max_element(probs.begin(), probs.end());
    if (!(lo <= s && s <= hi)) ++bad_bounds;

    InferenceSet shuffled = set;
    std::shuffle(shuffled.elements.begin(), shuffled.elements.end(), rng);
    double t = ScoreEmotion(shuffled, Role::kActor, Emotion::kJoy, dict, backend);
    if (std::abs(s - t) > 1e-12) ++bad_perm;

    double p = unit(rng);
    std::vector<InferenceRecord> same;
    for (const InferenceElement &el : set.elements) {
      same.push_back({el.text, Dimension::kXReact, std::nullopt, {{word, p}}});
    }
    FixtureBackend flat(same);
    double f = ScoreEmotion(set, Role::kActor, Emotion::kJoy, dict, flat);
    if (std::abs(f - p) > 1e-12) ++bad_fixed;
  }
  std::ostringstream d;
  d << "1000 sets; violations: bounds " << bad_bounds << ", permutation " << bad_perm
    << ", fixed point " << bad_fixed;
  return {bad_bounds == 0 && bad_perm == 0 && bad_fixed == 0, d.str()};
}

Outcome ZeroShotRate() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const FrequencyTable published = FrequencyTable::Published();
  std::vector<double> table_q;
  for (Role r : kAllRoles) {
    for (Emotion e : kAllEmotions) table_q.push_back(published.Get(e, r));
  }
  int bad = 0;
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 20 + static_cast<int>(rng() % 480);
    const int shape = trial % 3;
    std::vector<TrainingPair> pairs;
    for (Role r : kAllRoles) {
      for (int i = 0; i < n; ++i) {
        TrainingPair p;
        p.role = r;
        for (double &s : p.scores) {
          if (shape == 0) s = unit(rng);
          else if (shape == 1) s = std::exp(-12.0 * unit(rng));  // log-uniform-ish
          else s = std::clamp(0.5 + 0.15 * normal(rng), 0.0, 1.0);
        }
        pairs.push_back(p);
      }
    }
    // Each (emotion, role) gets a q drawn from the published rows.
    FrequencyTable freq;
    for (Role r : kAllRoles) {
      for (Emotion e : kAllEmotions) freq.Set(e, r, table_q[rng() % table_q.size()]);
    }
    ThresholdSet t = CalibrateZeroShot(pairs, freq, QuantileMode::kComplement);
    for (Role r : kAllRoles) {
      for (Emotion e : kAllEmotions) {
        int above = 0;
        for (const TrainingPair &p : pairs) {
          if (p.role == r && p.scores[Index(e)] > t.Get(e, r)) ++above;
        }
        double rate = static_cast<double>(above) / n;
        double gap = std::abs(rate - freq.Get(e, r) / 100.0);
        worst = std::max(worst, gap * n);
        if (gap > 1.0 / n + 1e-12) ++bad;
      }
    }
  }
  return {bad == 0, "200 distributions x 16 thresholds; " + std::to_string(bad) +
                        " outside 1/N; worst gap " + Fmt("%.3f", worst) + "/N"};
}

// Brute force: F1 of every grid value as a reduced fraction, then the
// lowest value holding the maximum.
double BruteForceThreshold(const std::vector<TrainingPair> &pairs, Emotion e, Role r,
                           std::vector<double> grid) {
  std::sort(grid.begin(), grid.end());
  std::vector<std::pair<long, long>> f1;
  for (double g : grid) {
    long tp = 0, fp = 0, fn = 0;
    for (const TrainingPair &p : pairs) {
      if (p.role != r) continue;
      bool y = p.scores[Index(e)] > g, gold = p.gold.Contains(e);
      if (y && gold) ++tp;
      if (y && !gold) ++fp;
      if (!y && gold) ++fn;
    }
    long num = 2 * tp, den = 2 * tp + fp + fn;
    if (den == 0) {
      f1.push_back({0, 1});
    } else {
      long g2 = std::gcd(num, den);
      f1.push_back({num / g2, den / g2});
    }
  }
  size_t best = 0;
  for (size_t i = 1; i < f1.size(); ++i) {
    if (static_cast<__int128>(f1[i].first) * f1[best].second >
        static_cast<__int128>(f1[best].first) * f1[i].second) {
      best = i;
    }
  }
  return grid[best];
}

Outcome FewShotOptimality() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<double> full = DefaultGrid();
  int bad = 0, ties = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> grid;
    int k = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < k; ++i) grid.push_back(full[rng() % full.size()]);
    grid.push_back(grid.front());  // duplicates and disorder are allowed
    std::shuffle(grid.begin(), grid.end(), rng);

    std::vector<TrainingPair> pairs;
    int n = 4 + static_cast<int>(rng() % 20);
    for (Role r : kAllRoles) {
      for (int i = 0; i < n; ++i) {
        TrainingPair p;
        p.role = r;
        for (Emotion e : kAllEmotions) {
          double s = rng() % 3 == 0 ? grid[rng() % grid.size()] : std::pow(unit(rng), 3);
          p.scores[Index(e)] = s;
          if (rng() % 3 == 0) p.gold.Insert(e);
        }
        pairs.push_back(p);
      }
    }
    ThresholdSet t = CalibrateFewShot(pairs, grid);
    for (Role r : kAllRoles) {
      for (Emotion e : kAllEmotions) {
        double expect = BruteForceThreshold(pairs, e, r, grid);
        if (t.Get(e, r) != expect) ++bad;
        std::set<double> distinct(grid.begin(), grid.end());
        ties += distinct.size() > 1 && expect == *distinct.begin();
      }
    }
  }
  return {bad == 0, "100 tables x 16 thresholds; " + std::to_string(bad) +
                        " disagreements with brute force (" + std::to_string(ties) +
                        " resolved at the lowest grid value)"};
}

double TotalF1(const std::string &report_path) {
  for (const Json &j : ReadRecordFile(report_path).records) {
    if (j["kind"] == "metric" && j["scope"] == "total") return j["f1"].get<double>();
  }
  throw std::runtime_error("no total in " + report_path);
}

RunConfig SyntheticConfig(const TempDir &dir, int stories, const std::string &out) {
  SyntheticOptions o;
  o.stories = stories;
  std::string release = dir.File("release");
  if (!std::filesystem::exists(release)) {
    WriteSyntheticRelease(GenerateSyntheticRelease(o), release);
  }
  RunConfig c = RunConfig::FromJson({{"importer", "release/importer.json"},
                                     {"conllu", "release/parses.conllu"},
                                     {"entities", "release/entities.jsonl"},
                                     {"mode", "few-shot"},
                                     {"workers", 2},
                                     {"out", out}},
                                    dir.path());
  return c;
}

Outcome SyntheticClosure() {
  TempDir dir;
  RunConfig c = SyntheticConfig(dir, 50, "out");
  std::ostringstream err;
  int status = CmdChain(c, err);
  if (status != 0) return {false, "pipeline exit " + std::to_string(status) + ": " + err.str()};
  double f1 = TotalF1(c.out + "/" + artifact::kReport);
  Corpus corpus = ReadCorpus(c.out + "/" + artifact::kCorpus);
  return {f1 >= 0.95, std::to_string(corpus.stories.size()) + " stories, micro-F1 " +
                          Fmt("%.4f", f1) + " (needs >= 0.95)"};
}

Outcome RoleConformance() {
  testing::Conformance c = testing::LoadConformance(EMOTRACK_TEST_DATA);
  std::vector<RoleAssignment> roles = AssignRoles(c.graphs, c.rosters, PatternTable::Default());
  std::map<std::pair<std::string, std::string>, std::string> got;
  for (const RoleAssignment &r : roles) got[{r.story_id, r.character}] = RoleName(r.role);
  int agree = 0;
  std::string first_miss;
  for (const auto &[key, label] : c.labels) {
    auto it = got.find(key);
    std::string predicted = it == got.end() ? "absent" : it->second;
    if (predicted == label) {
      ++agree;
    } else if (first_miss.empty()) {
      first_miss = "; first miss " + key.first + "/" + key.second + ": " + predicted;
    }
  }
  bool extra = false;
  for (const auto &[key, role] : got) extra |= c.labels.count(key) == 0;
  bool ok = c.graphs.size() == 20 && agree == static_cast<int>(c.labels.size()) && !extra;
  return {ok, std::to_string(c.graphs.size()) + " sentences, " + std::to_string(agree) + "/" +
                  std::to_string(c.labels.size()) + " labels agree" + first_miss};
}

std::vector<Json> PredictionRecords(const RunConfig &c) {
  return ReadRecordFile(c.out + "/" + artifact::kPredictions).records;
}

Outcome DeterminismAndSubstitutability() {
  TempDir dir;
  std::ostringstream err;
  const char *names[] = {artifact::kCorpus,     artifact::kResolved,  artifact::kCorefFlags,
                         artifact::kRoles,      artifact::kScores,    artifact::kFailures,
                         artifact::kThresholds, artifact::kPredictions, artifact::kReportText,
                         artifact::kReport};

  // Two full runs with the same configuration.
  RunConfig a = SyntheticConfig(dir, 20, "run-a");
  RunConfig b = SyntheticConfig(dir, 20, "run-b");
  a.record = dir.File("synthetic-fixture.jsonl");
  b.record = a.record;
  if (CmdChain(a, err) != 0 || CmdChain(b, err) != 0) return {false, err.str()};
  int differing = 0;
  for (const char *n : names) {
    differing += ReadFileOrThrow(a.out + "/" + n) != ReadFileOrThrow(b.out + "/" + n);
  }

  // Replay the synthetic oracle's recorded answers.
  RunConfig replay = SyntheticConfig(dir, 20, "replay");
  replay.backend = "fixture:" + a.record;
  if (CmdChain(replay, err) != 0) return {false, err.str()};
  bool synthetic_replay = PredictionRecords(replay) == PredictionRecords(a);

  // Remote backend behind the wire protocol, recorded and replayed.
  Corpus corpus = ReadCorpus(a.out + "/" + artifact::kResolved);
  std::vector<RoleAssignment> roles =
      RolesFromRecords(ReadRecordFile(a.out + "/" + artifact::kRoles), "roles");
  SyntheticBackend model =
      SyntheticBackend::FromCorpus(corpus, roles, EmotionDictionary::Default());
  FakeAdapter adapter(model, "wire-model");
  RunConfig remote = SyntheticConfig(dir, 20, "remote");
  remote.backend = "remote:" + adapter.Url();
  remote.record = dir.File("remote-fixture.jsonl");
  if (CmdChain(remote, err) != 0) return {false, err.str()};
  RunConfig remote_replay = SyntheticConfig(dir, 20, "remote-replay");
  remote_replay.backend = "fixture:" + remote.record;
  long calls = adapter.requests();
  if (CmdChain(remote_replay, err) != 0) return {false, err.str()};
  bool remote_ok = PredictionRecords(remote_replay) == PredictionRecords(remote) &&
                   PredictionRecords(remote) == PredictionRecords(a) &&
                   adapter.requests() == calls;

  bool ok = differing == 0 && synthetic_replay && remote_ok;
  return {ok, std::to_string(differing) + "/10 artifacts differ between runs; replay of " +
                  "synthetic " + (synthetic_replay ? "identical" : "DIFFERENT") +
                  ", replay of remote " + (remote_ok ? "identical" : "DIFFERENT")};
}

Outcome ContextCausality() {
  TempDir dir;
  RunConfig c = SyntheticConfig(dir, 30, "out");
  std::ostringstream err;
  if (CmdChain(c, err) != 0) return {false, err.str()};
  const Corpus raw = ReadCorpus(c.out + "/" + artifact::kCorpus);
  const Corpus resolved = ReadCorpus(c.out + "/" + artifact::kResolved);
  const std::vector<DepGraph> graphs = ReadConllu(c.conllu);
  const EntityFeatureTable features = EntityFeatureTable::Read(c.entities);
  const ThresholdSet thresholds =
      ThresholdsFromRecords(ReadRecordFile(c.out + "/" + artifact::kThresholds), "t");
  const std::vector<Prediction> full =
      PredictionsFromRecords(ReadRecordFile(c.out + "/" + artifact::kPredictions), "p");
  const EmotionDictionary dict = EmotionDictionary::Default();
  const std::vector<RoleAssignment> full_roles =
      RolesFromRecords(ReadRecordFile(c.out + "/" + artifact::kRoles), "r");
  // The oracle answers from event text alone, so one instance serves all
  // prefixes.
  const SyntheticBackend backend = SyntheticBackend::FromCorpus(resolved, full_roles, dict);

  int mismatched_prefixes = 0, checked = 0;
  RuleCorefResolver resolver;
  for (int len = 1; len <= 5; ++len) {
    Corpus prefix = raw;
    for (Story &s : prefix.stories) {
      s.lines.resize(std::min<size_t>(s.lines.size(), len));
      s = resolver.Resolve(s, s.characters, features).story;
    }
    std::vector<DepGraph> prefix_graphs;
    std::map<std::string, std::vector<std::string>> rosters;
    for (const Story &s : prefix.stories) rosters[s.story_id] = s.characters;
    for (const DepGraph &g : graphs) {
      if (g.StoryLine()->second < len) prefix_graphs.push_back(g);
    }
    std::vector<RoleAssignment> roles =
        AssignRoles(prefix_graphs, rosters, PatternTable::Default());
    PipelineOptions options;
    ScoringResult scored = ScorePairs(prefix, roles, backend, dict, options);
    std::vector<Prediction> got = ClassifyAll(scored.table, thresholds);
    std::vector<Prediction> expect;
    for (const Prediction &p : full) {
      if (p.key.line < len) expect.push_back(p);
    }
    ++checked;
    bool texts_match = true;
    for (size_t i = 0; i < prefix.stories.size(); ++i) {
      for (size_t l = 0; l < prefix.stories[i].lines.size(); ++l) {
        texts_match &= prefix.stories[i].lines[l] == resolved.stories[i].lines[l];
      }
    }
    if (got != expect || !texts_match) ++mismatched_prefixes;
  }
  return {mismatched_prefixes == 0,
          std::to_string(checked) + " prefix lengths over " +
              std::to_string(raw.stories.size()) + " stories; " +
              std::to_string(mismatched_prefixes) + " differ from the full-story prefix"};
}

Outcome InferenceSetShape() {
  TempDir dir;
  RunConfig c = SyntheticConfig(dir, 20, "out");
  std::ostringstream err;
  for (auto cmd : {CmdIngest, CmdCoref, CmdRoles, CmdInfer}) {
    if (cmd(c, err) != 0) return {false, err.str()};
  }
  const Corpus corpus = ReadCorpus(c.out + "/" + artifact::kResolved);
  const std::vector<RoleAssignment> roles =
      RolesFromRecords(ReadRecordFile(c.out + "/" + artifact::kRoles), "r");
  const ScoreTable scores =
      ScoresFromRecords(ReadRecordFile(c.out + "/" + artifact::kScores), "s");
  std::map<PairKey, Role> role_of;
  for (const RoleAssignment &r : roles) role_of[r.Key()] = r.role;
  const SyntheticBackend backend =
      SyntheticBackend::FromCorpus(corpus, roles, EmotionDictionary::Default());

  int bad = 0, t0_actor = 0, with_effect = 0, without_effect = 0;
  for (const ScoreEntry &e : scores.entries) {
    const Story *story = corpus.FindStory(e.key.story_id);
    const std::string &event = story->lines[e.key.line].EventText();
    const auto &el = e.inference_set.elements;
    std::vector<InferenceElement> expect = {{event, Provenance::kRawEvent}};
    if (e.role == Role::kActor) {
      expect.push_back({backend.Generate(event, Dimension::kXIntent), Provenance::kXIntent});
      expect.push_back({backend.Generate(event, Dimension::kXReact), Provenance::kXReactText});
    } else {
      expect.push_back({backend.Generate(event, Dimension::kOReact), Provenance::kOReactText});
    }
    auto prev = role_of.find({e.key.story_id, e.key.line - 1, e.key.character});
    if (e.key.line > 0 && prev != role_of.end()) {
      const std::string &before = story->lines[e.key.line - 1].EventText();
      bool actor = prev->second == Role::kActor;
      expect.push_back({backend.Generate(before, actor ? Dimension::kXEffect : Dimension::kOEffect),
                        actor ? Provenance::kPrevXEffect : Provenance::kPrevOEffect});
      ++with_effect;
    } else {
      ++without_effect;
    }
    if (e.key.line == 0 && e.role == Role::kActor) {
      ++t0_actor;
      bad += el.size() != 3;
    }
    bad += el != expect;
  }
  return {bad == 0 && t0_actor > 0 && with_effect > 0,
          std::to_string(scores.entries.size()) + " sets (" + std::to_string(t0_actor) +
              " t=0 actor, " + std::to_string(with_effect) + " with a previous effect, " +
              std::to_string(without_effect) + " without); " + std::to_string(bad) +
              " malformed"};
}

}  // namespace
}  // namespace emotrack

int main() {
  using namespace emotrack;
  Report("metrics-worked-example", 1, MetricsWorkedExample);
  Report("geometric-mean-properties", 10, GeometricMeanProperties);
  Report("zero-shot-rate", 10, ZeroShotRate);
  Report("few-shot-optimality", 30, FewShotOptimality);
  Report("synthetic-closure", 120, SyntheticClosure);
  Report("role-labeling-conformance", 5, RoleConformance);
  Report("determinism-substitutability", 120, DeterminismAndSubstitutability);
  Report("context-causality", 60, ContextCausality);
  Report("inference-set-shape", 30, InferenceSetShape);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
