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

#ifndef EMOTRACK_STAGES_H_
#define EMOTRACK_STAGES_H_

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "emotrack/backend.h"
#include "emotrack/corpus.h"
#include "emotrack/coref.h"
#include "emotrack/engine.h"
#include "emotrack/evalkit.h"
#include "emotrack/records.h"
#include "emotrack/roles.h"

namespace emotrack {

inline constexpr char kToolName[] = "emotrack";
inline constexpr char kToolVersion[] = "0.1.0";

// Process exit statuses of the stage commands.
enum ExitCode {
  kExitOk = 0,
  kExitConfig = 1,
  kExitMissingArtifact = 2,
  kExitBackend = 3,
  kExitValidation = 4,
};

// Effective configuration of a run. Relative paths in a config file are
// resolved against the file's directory.
struct RunConfig {
  std::string importer;  // importer config (JSON)
  std::string conllu;    // dependency parses of the resolved lines
  std::string entities;  // optional entity feature sidecar
  std::string patterns;  // optional relation -> role table
  std::vector<std::string> pronouns;  // empty: default targets

  // "synthetic", "fixture:<path>", "remote:<url>" or a bare http:// URL.
  std::string backend = "synthetic";
  std::string cache;   // inference cache file, "" for none
  std::string record;  // if set, infer also writes a replay fixture here

  std::string mode = "few-shot";       // few-shot | zero-shot | fixed
  std::string quantile = "complement";  // complement | literal
  std::string frequencies = "observed";  // observed | published
  std::vector<double> grid;              // empty: DefaultGrid()
  double threshold = 0.5;                // fixed mode only
  Json dictionary = Json::object();      // overrides of the default words

  std::string train_split;  // "" selects every story
  std::string eval_split;
  bool include_absent = false;
  bool include_current_effect = false;
  double floor = 0.0;
  int workers = 1;

  std::string out = "out";

  // Unknown keys are rejected with ConfigError.
  static RunConfig FromJson(const Json &json, const std::string &base_dir);
  Json ToJson() const;
  // The configuration echoed into artifact headers: ToJson() without the
  // output directory and worker count, neither of which influences content.
  Json Echo() const;
  std::string Hash() const;
};

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr char kCorpus[] = "corpus.jsonl";
inline constexpr char kResolved[] = "resolved.jsonl";
inline constexpr char kCorefFlags[] = "coref_flags.jsonl";
inline constexpr char kRoles[] = "roles.jsonl";
inline constexpr char kScores[] = "scores.jsonl";
inline constexpr char kFailures[] = "failures.jsonl";
inline constexpr char kThresholds[] = "thresholds.jsonl";
inline constexpr char kPredictions[] = "predictions.jsonl";
inline constexpr char kReportText[] = "report.txt";
inline constexpr char kReport[] = "report.jsonl";
}  // namespace artifact

// Header record common to every artifact; `extra` keys are merged in.
Json ArtifactHeader(const std::string &name, const RunConfig &config,
                    const Json &extra = Json::object());

// Builds the backend named by config.backend. The synthetic oracle needs
// the gold corpus and the role assignments.
std::unique_ptr<InferenceBackend> MakeBackend(const RunConfig &config, const Corpus &corpus,
                                              const std::vector<RoleAssignment> &roles);

// The stage commands. Each reads its predecessors' artifacts from
// config.out and writes its own there. Errors are reported on `err`; the
// return value is an ExitCode.
int CmdIngest(const RunConfig &config, std::ostream &err);
int CmdCoref(const RunConfig &config, std::ostream &err);
int CmdRoles(const RunConfig &config, std::ostream &err);
int CmdInfer(const RunConfig &config, std::ostream &err);
int CmdCalibrate(const RunConfig &config, std::ostream &err);
int CmdClassify(const RunConfig &config, std::ostream &err);
int CmdEvaluate(const RunConfig &config, std::ostream &err);

// All seven commands in order, stopping at the first nonzero status.
int CmdChain(const RunConfig &config, std::ostream &err);

// The whole pipeline in one process: intermediate results are passed in
// memory, and every artifact is written once at the end. The artifacts are
// byte-identical to those of CmdChain.
int RunInProcess(const RunConfig &config, std::ostream &err);

}  // namespace emotrack

#endif  // EMOTRACK_STAGES_H_
