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

// Command-line driver: one subcommand per pipeline stage, plus `run` for
// the whole chain and `synth` for a synthetic release.

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "emotrack/errors.h"
#include "emotrack/records.h"
#include "emotrack/stages.h"
#include "emotrack/synthetic.h"

namespace fs = std::filesystem;
using emotrack::Json;
using emotrack::RunConfig;

namespace {

// Flags seen on the command line, as run-config keys. They override the
// config file, which overrides the defaults.
struct Overrides {
  std::string config_path;
  Json values = Json::object();
};

void AddSharedFlags(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--config", o.config_path, "Run config (JSON)");
  auto str = [&](const char *flag, const char *key, const char *help) {
    cmd->add_option_function<std::string>(
        flag, [&o, key](const std::string &v) { o.values[key] = v; }, help);
  };
  str("--out", "out", "Artifact directory");
  str("--backend", "backend", "synthetic | fixture:<path> | remote:<url>");
  str("--cache", "cache", "Inference cache file");
  str("--mode", "mode", "few-shot | zero-shot | fixed");
  str("--quantile", "quantile", "complement | literal");
  str("--importer", "importer", "Importer config (JSON)");
  str("--conllu", "conllu", "Dependency parses of the resolved lines");
  str("--entities", "entities", "Entity feature sidecar");
  str("--patterns", "patterns", "Relation-to-role table");
  str("--record", "record", "Also write the backend answers as a replay fixture");
  str("--frequencies", "frequencies", "observed | published (zero-shot)");
  str("--train-split", "train_split", "Calibration split (default: all stories)");
  str("--eval-split", "eval_split", "Evaluation split (default: all stories)");
  cmd->add_option_function<int>(
      "--workers", [&o](int v) { o.values["workers"] = v; }, "Inference worker threads");
  cmd->add_option_function<double>(
      "--floor", [&o](double v) { o.values["floor"] = v; }, "Probability floor");
  cmd->add_option_function<double>(
      "--threshold", [&o](double v) { o.values["threshold"] = v; }, "Fixed-mode threshold");
  cmd->add_flag_function(
      "--include-absent", [&o](int64_t) { o.values["include_absent"] = true; },
      "Count pairs without a role as predicted-empty");
  cmd->add_flag_function(
      "--include-current-effect",
      [&o](int64_t) { o.values["include_current_effect"] = true; },
      "Also use the current line's effect inference");
}

RunConfig EffectiveConfig(const Overrides &o) {
  Json merged = Json::object();
  if (!o.config_path.empty()) {
    if (!fs::exists(o.config_path)) throw emotrack::MissingArtifactError(o.config_path);
    Json file;
    try {
      file = Json::parse(emotrack::ReadFileOrThrow(o.config_path));
    } catch (const Json::parse_error &e) {
      throw emotrack::ParseError(o.config_path, 1, e.what());
    }
    std::string dir = fs::path(o.config_path).parent_path().string();
    merged = RunConfig::FromJson(file, dir.empty() ? "." : dir).ToJson();
  }
  for (const auto &[key, value] : o.values.items()) merged[key] = value;
  return RunConfig::FromJson(merged, "");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Character emotion tracking over short stories"};
  app.require_subcommand(1);

  Overrides overrides;
  using Command = std::function<int(const RunConfig &, std::ostream &)>;
  const std::map<std::string, std::pair<std::string, Command>> stages = {
      {"ingest", {"Import an annotated story release", emotrack::CmdIngest}},
      {"coref", {"Resolve pronouns to characters", emotrack::CmdCoref}},
      {"roles", {"Label characters as actors or objects", emotrack::CmdRoles}},
      {"infer", {"Build inference sets and score emotions", emotrack::CmdInfer}},
      {"calibrate", {"Fit per-emotion thresholds", emotrack::CmdCalibrate}},
      {"classify", {"Apply thresholds to the scores", emotrack::CmdClassify}},
      {"evaluate", {"Compare predictions with gold labels", emotrack::CmdEvaluate}},
      {"run", {"Run every stage in order", emotrack::CmdChain}},
  };
  std::map<CLI::App *, Command> commands;
  for (const auto &[name, entry] : stages) {
    CLI::App *cmd = app.add_subcommand(name, entry.first);
    AddSharedFlags(cmd, overrides);
    commands[cmd] = entry.second;
  }

  emotrack::SyntheticOptions synth_options;
  std::string synth_dir = "synthetic";
  CLI::App *synth = app.add_subcommand("synth", "Write a synthetic annotated release");
  synth->add_option("--dir", synth_dir, "Output directory");
  synth->add_option("--stories", synth_options.stories, "Number of stories");
  synth->add_option("--lines", synth_options.lines, "Lines per story");
  synth->add_option("--seed", synth_options.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    try {
      emotrack::SyntheticRelease release = emotrack::GenerateSyntheticRelease(synth_options);
      emotrack::WriteSyntheticRelease(release, synth_dir);
      Json run = {{"importer", "importer.json"},
                  {"conllu", "parses.conllu"},
                  {"entities", "entities.jsonl"},
                  {"backend", "synthetic"},
                  {"out", "out"}};
      emotrack::WriteFileOrThrow((fs::path(synth_dir) / "run.json").string(),
                                 run.dump(2) + "\n");
    } catch (const std::exception &e) {
      std::cerr << "error: " << e.what() << "\n";
      return emotrack::kExitConfig;
    }
    return emotrack::kExitOk;
  }

  for (const auto &[cmd, fn] : commands) {
    if (!cmd->parsed()) continue;
    RunConfig config;
    try {
      config = EffectiveConfig(overrides);
    } catch (const emotrack::MissingArtifactError &e) {
      std::cerr << "error: " << e.what() << "\n";
      return emotrack::kExitMissingArtifact;
    } catch (const emotrack::ParseError &e) {
      std::cerr << "error: " << e.what() << "\n";
      return emotrack::kExitValidation;
    } catch (const std::exception &e) {
      std::cerr << "error: " << e.what() << "\n";
      return emotrack::kExitConfig;
    }
    return fn(config, std::cerr);
  }
  return emotrack::kExitConfig;
}
