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

#include "emotrack/stages.h"

#include <filesystem>
#include <map>
#include <set>

#include "emotrack/conllu.h"
#include "emotrack/errors.h"
#include "emotrack/text.h"

namespace emotrack {

namespace fs = std::filesystem;

namespace {

std::string Resolve(const std::string &path, const std::string &base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

void RequireFile(const std::string &path) {
  if (path.empty() || !fs::exists(path)) throw MissingArtifactError(path);
}

std::string OutPath(const RunConfig &config, const char *name) {
  return (fs::path(config.out) / name).string();
}

RecordFile ReadArtifact(const RunConfig &config, const char *name) {
  std::string path = OutPath(config, name);
  RequireFile(path);
  return ReadRecordFile(path);
}

std::string HeaderString(const RecordFile &file, const char *key) {
  if (file.header.is_object() && file.header.contains(key) && file.header[key].is_string()) {
    return file.header[key].get<std::string>();
  }
  return "";
}

std::vector<std::string> PronounTargets(const RunConfig &config) {
  return config.pronouns.empty() ? DefaultTargetPronouns() : config.pronouns;
}

PatternTable LoadPatterns(const RunConfig &config) {
  if (config.patterns.empty()) return PatternTable::Default();
  RequireFile(config.patterns);
  return PatternTable::Parse(ReadFileOrThrow(config.patterns), config.patterns);
}

EmotionDictionary LoadDictionary(const RunConfig &config) {
  return EmotionDictionary::FromJson(config.dictionary);
}

// ---------------------------------------------------------------------------
// Stage bodies. Each is a function of its inputs; the Cmd* wrappers read
// and write artifacts around them.

struct IngestOutput {
  Corpus corpus;
  Json importer;
};

IngestOutput Ingest(const RunConfig &config, std::ostream &err) {
  RequireFile(config.importer);
  Json raw;
  try {
    raw = Json::parse(ReadFileOrThrow(config.importer));
  } catch (const Json::parse_error &e) {
    throw ParseError(config.importer, 1, e.what());
  }
  ImportConfig ic =
      ImportConfig::FromJson(raw, fs::path(config.importer).parent_path().string());
  RequireFile(ic.stories.file);
  RequireFile(ic.annotations.file);
  ImportResult result = ImportCorpus(ic);
  for (const std::string &msg : result.rejected) err << "warning: rejected " << msg << "\n";
  std::vector<Violation> violations = ValidateCorpus(result.corpus);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " corpus violation(s)";
    for (size_t i = 0; i < violations.size() && i < 5; ++i) {
      msg += "\n  " + violations[i].story_id + " " + violations[i].locus + ": " +
             violations[i].message;
    }
    throw ValidationError(msg);
  }
  Json importer = ic.ToJson();
  importer["rejected"] = result.rejected.size();
  return {std::move(result.corpus), std::move(importer)};
}

struct CorefOutput {
  Corpus corpus;
  std::vector<Json> flags;
  std::string resolver;
};

CorefOutput Coref(const RunConfig &config, const Corpus &corpus) {
  EntityFeatureTable features;
  if (!config.entities.empty()) {
    RequireFile(config.entities);
    features = EntityFeatureTable::Read(config.entities);
  }
  RuleCorefResolver resolver(PronounTargets(config));
  CorefOutput out;
  out.corpus = corpus;
  out.resolver = resolver.Name();
  for (Story &story : out.corpus.stories) {
    CorefResult r = resolver.Resolve(story, story.characters, features);
    for (const CorefFlag &f : r.flags) {
      Json rec = {{"kind", "coref_flag"},
                  {"story_id", story.story_id},
                  {"line", f.line},
                  {"offset", f.offset},
                  {"pronoun", f.pronoun},
                  {"flag", std::string(CorefFlagKindName(f.kind))}};
      if (!f.antecedent.empty()) rec["antecedent"] = f.antecedent;
      out.flags.push_back(std::move(rec));
    }
    story = std::move(r.story);
  }
  return out;
}

std::vector<RoleAssignment> Roles(const RunConfig &config, const Corpus &corpus,
                                  std::ostream &err) {
  RequireFile(config.conllu);
  std::vector<DepGraph> graphs = ReadConllu(config.conllu);
  std::map<std::string, std::vector<const DepGraph *>> by_story;
  int mismatched = 0;
  for (const DepGraph &g : graphs) {
    std::vector<std::string> problems = ValidateGraph(g);
    if (!problems.empty()) {
      throw ValidationError(config.conllu + ": sentence " + g.sent_id + ": " + problems[0]);
    }
    auto id = g.StoryLine();
    if (!id) continue;
    const Story *story = corpus.FindStory(id->first);
    if (story == nullptr || id->second < 0 ||
        id->second >= static_cast<int>(story->lines.size())) {
      throw ValidationError(config.conllu + ": sentence " + g.sent_id +
                            " does not name a corpus line");
    }
    if (!g.text.empty() && g.text != story->lines[id->second].EventText()) ++mismatched;
    by_story[id->first].push_back(&g);
  }
  if (mismatched > 0) {
    err << "warning: " << mismatched << " parse(s) differ from the resolved line text\n";
  }
  std::map<std::string, std::vector<std::string>> rosters;
  for (const Story &s : corpus.stories) {
    rosters[s.story_id] = s.characters.empty() ? DetectCharacters(by_story[s.story_id])
                                               : s.characters;
  }
  return AssignRoles(graphs, rosters, LoadPatterns(config));
}

struct InferOutput {
  ScoringResult scoring;
  std::string identity;
};

InferOutput Infer(const RunConfig &config, const Corpus &corpus,
                  const std::vector<RoleAssignment> &roles) {
  std::unique_ptr<InferenceBackend> backend = MakeBackend(config, corpus, roles);
  const InferenceBackend *active = backend.get();
  std::unique_ptr<InferenceCache> cache;
  std::unique_ptr<CachingBackend> caching;
  if (!config.cache.empty()) {
    if (fs::path(config.cache).has_parent_path()) {
      fs::create_directories(fs::path(config.cache).parent_path());
    }
    cache = std::make_unique<InferenceCache>(config.cache);
    caching = std::make_unique<CachingBackend>(*active, *cache);
    active = caching.get();
  }
  std::unique_ptr<RecordingBackend> recording;
  if (!config.record.empty()) {
    recording = std::make_unique<RecordingBackend>(*active);
    active = recording.get();
  }
  PipelineOptions options;
  options.inference.include_current_effect = config.include_current_effect;
  options.floor = config.floor;
  options.workers = config.workers;
  InferOutput out;
  out.identity = active->Identity();
  out.scoring = ScorePairs(corpus, roles, *active, LoadDictionary(config), options);
  if (recording) WriteFixture(config.record, recording->Records(), out.identity);
  return out;
}

ThresholdSet Calibrate(const RunConfig &config, const Corpus &corpus,
                       const ScoreTable &scores) {
  CalibrationMode mode = ParseCalibrationMode(config.mode);
  if (mode == CalibrationMode::kFixed) {
    ThresholdSet t = ThresholdSet::Uniform(config.threshold);
    t.mode = mode;
    t.provenance = {{"method", "fixed"}, {"threshold", config.threshold}};
    return t;
  }
  std::vector<TrainingPair> pairs = TrainingPairs(scores, corpus, config.train_split);
  if (pairs.empty()) {
    throw ValidationError("no scored, annotated pairs on the training split \"" +
                          config.train_split + "\"");
  }
  ThresholdSet t;
  if (mode == CalibrationMode::kZeroShot) {
    FrequencyTable freq;
    if (config.frequencies == "published") {
      freq = FrequencyTable::Published();
    } else if (config.frequencies == "observed") {
      freq = FrequencyTable::Observed(pairs);
    } else {
      throw ConfigError("frequencies must be observed or published, got " +
                        config.frequencies);
    }
    t = CalibrateZeroShot(pairs, freq, ParseQuantileMode(config.quantile));
    t.provenance["frequency_source"] = config.frequencies;
  } else {
    t = CalibrateFewShot(pairs, config.grid.empty() ? DefaultGrid() : config.grid);
  }
  t.mode = mode;
  t.provenance["split"] = config.train_split;
  return t;
}

Json ThresholdsJson(const ThresholdSet &t) {
  Json j = Json::object();
  for (Role r : kAllRoles) {
    for (Emotion e : kAllEmotions) {
      j[std::string(RoleName(r))][std::string(EmotionName(e))] = t.Get(e, r);
    }
  }
  return j;
}

EvaluationReport EvaluateRun(const RunConfig &config, const Corpus &corpus,
                             const std::vector<Prediction> &predictions,
                             const std::vector<PairFailure> &failures,
                             const ThresholdSet &thresholds, const std::string &identity) {
  Json patterns = Json::object();
  const PatternTable table = LoadPatterns(config);
  for (const auto &[rel, role] : table.entries()) {
    patterns[rel] = std::string(RoleName(role));
  }
  Json echo = {
      {"run", config.Echo()},
      {"backend", identity},
      {"calibration", std::string(CalibrationModeName(thresholds.mode))},
      {"calibration_provenance", thresholds.provenance},
      {"thresholds", ThresholdsJson(thresholds)},
      {"aggregation", std::string(AggregationName(corpus.aggregation))},
      {"absent_pairs", config.include_absent ? "counted as predicted-empty" : "excluded"},
      {"pronoun_targets", PronounTargets(config)},
      {"role_patterns", patterns},
      {"dictionary", LoadDictionary(config).ToJson()},
  };
  EvaluationOptions options;
  options.include_absent = config.include_absent;
  options.split = config.eval_split;
  return Evaluate(corpus, predictions, failures, options, echo);
}

// ---------------------------------------------------------------------------
// Artifact writers shared by the chained and in-process paths.

void EnsureOut(const RunConfig &config) { fs::create_directories(config.out); }

void WriteIngest(const RunConfig &config, const IngestOutput &in) {
  WriteCorpus(OutPath(config, artifact::kCorpus), in.corpus,
              ArtifactHeader("corpus", config, {{"importer", in.importer}}));
}

void WriteCoref(const RunConfig &config, const CorefOutput &c) {
  Json extra = {{"resolver", c.resolver}, {"pronoun_targets", PronounTargets(config)}};
  WriteCorpus(OutPath(config, artifact::kResolved), c.corpus,
              ArtifactHeader("resolved", config, extra));
  WriteRecordFile(OutPath(config, artifact::kCorefFlags),
                  ArtifactHeader("coref_flags", config, extra), c.flags);
}

void WriteRoles(const RunConfig &config, const std::vector<RoleAssignment> &roles) {
  WriteRecordFile(OutPath(config, artifact::kRoles),
                  ArtifactHeader("roles", config, {{"patterns", LoadPatterns(config).ToText()}}),
                  RolesToRecords(roles));
}

void WriteInfer(const RunConfig &config, const InferOutput &inf) {
  Json extra = {{"backend", inf.identity},
                {"dictionary", LoadDictionary(config).ToJson()},
                {"include_current_effect", config.include_current_effect},
                {"floor", config.floor}};
  WriteRecordFile(OutPath(config, artifact::kScores), ArtifactHeader("scores", config, extra),
                  ScoresToRecords(inf.scoring.table));
  WriteRecordFile(OutPath(config, artifact::kFailures),
                  ArtifactHeader("failures", config, {{"backend", inf.identity}}),
                  FailuresToRecords(inf.scoring.failures));
}

void WriteThresholds(const RunConfig &config, const ThresholdSet &t,
                     const std::string &identity) {
  Json extra = {{"backend", identity},
                {"calibration", std::string(CalibrationModeName(t.mode))},
                {"provenance", t.provenance},
                {"dictionary", LoadDictionary(config).ToJson()}};
  WriteRecordFile(OutPath(config, artifact::kThresholds),
                  ArtifactHeader("thresholds", config, extra), ThresholdsToRecords(t));
}

void WritePredictions(const RunConfig &config, const std::vector<Prediction> &predictions,
                      const ThresholdSet &t, const std::string &identity) {
  Json extra = {{"backend", identity},
                {"calibration", std::string(CalibrationModeName(t.mode))}};
  WriteRecordFile(OutPath(config, artifact::kPredictions),
                  ArtifactHeader("predictions", config, extra),
                  PredictionsToRecords(predictions));
}

void WriteReport(const RunConfig &config, const EvaluationReport &report) {
  WriteFileOrThrow(OutPath(config, artifact::kReportText), RenderReport(report));
  WriteRecordFile(OutPath(config, artifact::kReport), ArtifactHeader("report", config),
                  ReportToRecords(report));
}

int ReportFailures(const std::vector<PairFailure> &failures, std::ostream &err) {
  if (failures.empty()) return kExitOk;
  err << "error: backend failed on " << failures.size() << " pair(s); first: "
      << ToString(failures.front().key) << ": " << failures.front().message << "\n";
  return kExitBackend;
}

template <typename F>
int Guard(std::ostream &err, F &&body) {
  try {
    return body();
  } catch (const MissingArtifactError &e) {
    err << "error: " << e.what() << "\n";
    return kExitMissingArtifact;
  } catch (const BackendError &e) {
    err << "error: backend: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ConfigError &e) {
    err << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error &e) {
    // Parse, validation and integrity errors: the inputs break an invariant.
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig.

RunConfig RunConfig::FromJson(const Json &j, const std::string &base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  static const std::set<std::string> kKeys = {
      "importer", "conllu",      "entities",    "patterns",      "pronouns",
      "backend",  "cache",       "record",      "mode",          "quantile",
      "frequencies", "grid",     "threshold",   "dictionary",    "train_split",
      "eval_split", "include_absent", "include_current_effect", "floor", "workers",
      "out"};
  for (const auto &[key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown run config key: " + key);
  }
  try {
    auto path = [&](const char *key, std::string &field) {
      if (j.contains(key)) field = Resolve(j[key].get<std::string>(), base_dir);
    };
    path("importer", c.importer);
    path("conllu", c.conllu);
    path("entities", c.entities);
    path("patterns", c.patterns);
    path("cache", c.cache);
    path("record", c.record);
    path("out", c.out);
    if (j.contains("pronouns")) c.pronouns = j["pronouns"].get<std::vector<std::string>>();
    if (j.contains("backend")) {
      c.backend = j["backend"].get<std::string>();
      if (c.backend.rfind("fixture:", 0) == 0) {
        c.backend = "fixture:" + Resolve(c.backend.substr(8), base_dir);
      }
    }
    if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
    if (j.contains("quantile")) c.quantile = j["quantile"].get<std::string>();
    if (j.contains("frequencies")) c.frequencies = j["frequencies"].get<std::string>();
    if (j.contains("grid")) c.grid = j["grid"].get<std::vector<double>>();
    if (j.contains("threshold")) c.threshold = j["threshold"].get<double>();
    if (j.contains("dictionary")) c.dictionary = j["dictionary"];
    if (j.contains("train_split")) c.train_split = j["train_split"].get<std::string>();
    if (j.contains("eval_split")) c.eval_split = j["eval_split"].get<std::string>();
    if (j.contains("include_absent")) c.include_absent = j["include_absent"].get<bool>();
    if (j.contains("include_current_effect")) {
      c.include_current_effect = j["include_current_effect"].get<bool>();
    }
    if (j.contains("floor")) c.floor = j["floor"].get<double>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
  } catch (const Json::exception &e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  return c;
}

Json RunConfig::ToJson() const {
  Json j = Echo();
  j["out"] = out;
  return j;
}

Json RunConfig::Echo() const {
  return {{"importer", importer},
          {"conllu", conllu},
          {"entities", entities},
          {"patterns", patterns},
          {"pronouns", pronouns},
          {"backend", backend},
          {"cache", cache},
          {"record", record},
          {"mode", mode},
          {"quantile", quantile},
          {"frequencies", frequencies},
          {"grid", grid},
          {"threshold", threshold},
          {"dictionary", dictionary},
          {"train_split", train_split},
          {"eval_split", eval_split},
          {"include_absent", include_absent},
          {"include_current_effect", include_current_effect},
          {"floor", floor}};
}

std::string RunConfig::Hash() const { return Hex64(Fnv1a64(Echo().dump())); }

Json ArtifactHeader(const std::string &name, const RunConfig &config, const Json &extra) {
  Json h = {{"kind", "header"},
            {"artifact", name},
            {"tool", kToolName},
            {"version", kToolVersion},
            {"config", config.Echo()},
            {"config_hash", config.Hash()}};
  for (const auto &[key, value] : extra.items()) h[key] = value;
  return h;
}

std::unique_ptr<InferenceBackend> MakeBackend(const RunConfig &config, const Corpus &corpus,
                                              const std::vector<RoleAssignment> &roles) {
  const std::string &spec = config.backend;
  if (spec == "synthetic") {
    return std::make_unique<SyntheticBackend>(
        SyntheticBackend::FromCorpus(corpus, roles, LoadDictionary(config)));
  }
  if (spec.rfind("fixture:", 0) == 0) {
    std::string path = spec.substr(8);
    RequireFile(path);
    return std::make_unique<FixtureBackend>(FixtureBackend::Read(path));
  }
  if (spec.rfind("remote:", 0) == 0) {
    return std::make_unique<RemoteBackend>(RemoteBackend::ParseSpec(spec.substr(7)));
  }
  if (spec.rfind("http://", 0) == 0) {
    return std::make_unique<RemoteBackend>(RemoteBackend::ParseSpec(spec));
  }
  throw ConfigError("backend must be synthetic, fixture:<path> or remote:<url>, got \"" +
                    spec + "\"");
}

// ---------------------------------------------------------------------------
// Commands.

int CmdIngest(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    IngestOutput in = Ingest(config, err);
    EnsureOut(config);
    WriteIngest(config, in);
    return kExitOk;
  });
}

int CmdCoref(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    Corpus corpus = CorpusFromRecords(ReadArtifact(config, artifact::kCorpus),
                                      OutPath(config, artifact::kCorpus));
    WriteCoref(config, Coref(config, corpus));
    return kExitOk;
  });
}

int CmdRoles(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    Corpus corpus = CorpusFromRecords(ReadArtifact(config, artifact::kResolved),
                                      OutPath(config, artifact::kResolved));
    WriteRoles(config, Roles(config, corpus, err));
    return kExitOk;
  });
}

int CmdInfer(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    Corpus corpus = CorpusFromRecords(ReadArtifact(config, artifact::kResolved),
                                      OutPath(config, artifact::kResolved));
    std::vector<RoleAssignment> roles = RolesFromRecords(
        ReadArtifact(config, artifact::kRoles), OutPath(config, artifact::kRoles));
    InferOutput inf = Infer(config, corpus, roles);
    WriteInfer(config, inf);
    return ReportFailures(inf.scoring.failures, err);
  });
}

int CmdCalibrate(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    Corpus corpus = CorpusFromRecords(ReadArtifact(config, artifact::kResolved),
                                      OutPath(config, artifact::kResolved));
    RecordFile scores_file = ReadArtifact(config, artifact::kScores);
    ScoreTable scores = ScoresFromRecords(scores_file, OutPath(config, artifact::kScores));
    WriteThresholds(config, Calibrate(config, corpus, scores),
                    HeaderString(scores_file, "backend"));
    return kExitOk;
  });
}

int CmdClassify(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    RecordFile scores_file = ReadArtifact(config, artifact::kScores);
    RecordFile thresholds_file = ReadArtifact(config, artifact::kThresholds);
    ScoreTable scores = ScoresFromRecords(scores_file, OutPath(config, artifact::kScores));
    ThresholdSet t =
        ThresholdsFromRecords(thresholds_file, OutPath(config, artifact::kThresholds));
    WritePredictions(config, ClassifyAll(scores, t), t,
                     HeaderString(scores_file, "backend"));
    return kExitOk;
  });
}

int CmdEvaluate(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    Corpus corpus = CorpusFromRecords(ReadArtifact(config, artifact::kResolved),
                                      OutPath(config, artifact::kResolved));
    RecordFile predictions_file = ReadArtifact(config, artifact::kPredictions);
    std::vector<Prediction> predictions =
        PredictionsFromRecords(predictions_file, OutPath(config, artifact::kPredictions));
    std::vector<PairFailure> failures = FailuresFromRecords(
        ReadArtifact(config, artifact::kFailures), OutPath(config, artifact::kFailures));
    ThresholdSet t = ThresholdsFromRecords(ReadArtifact(config, artifact::kThresholds),
                                           OutPath(config, artifact::kThresholds));
    WriteReport(config, EvaluateRun(config, corpus, predictions, failures, t,
                                    HeaderString(predictions_file, "backend")));
    return kExitOk;
  });
}

int CmdChain(const RunConfig &config, std::ostream &err) {
  for (auto cmd : {CmdIngest, CmdCoref, CmdRoles, CmdInfer, CmdCalibrate, CmdClassify,
                   CmdEvaluate}) {
    int status = cmd(config, err);
    if (status != kExitOk) return status;
  }
  return kExitOk;
}

int RunInProcess(const RunConfig &config, std::ostream &err) {
  return Guard(err, [&]() -> int {
    IngestOutput in = Ingest(config, err);
    CorefOutput coref = Coref(config, in.corpus);
    std::vector<RoleAssignment> roles = Roles(config, coref.corpus, err);
    InferOutput inf = Infer(config, coref.corpus, roles);
    EnsureOut(config);
    WriteIngest(config, in);
    WriteCoref(config, coref);
    WriteRoles(config, roles);
    WriteInfer(config, inf);
    if (int status = ReportFailures(inf.scoring.failures, err); status != kExitOk) {
      return status;
    }
    ThresholdSet t = Calibrate(config, coref.corpus, inf.scoring.table);
    std::vector<Prediction> predictions = ClassifyAll(inf.scoring.table, t);
    WriteThresholds(config, t, inf.identity);
    WritePredictions(config, predictions, t, inf.identity);
    WriteReport(config, EvaluateRun(config, coref.corpus, predictions, inf.scoring.failures,
                                    t, inf.identity));
    return kExitOk;
  });
}

}  // namespace emotrack
