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

// Helpers shared by the test binaries.

#ifndef EMOTRACK_TESTS_TESTING_H_
#define EMOTRACK_TESTS_TESTING_H_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>

#include <map>
#include <sstream>
#include <vector>

#include "emotrack/backend.h"
#include "emotrack/conllu.h"
#include "emotrack/errors.h"
#include "emotrack/roles.h"
#include "emotrack/text.h"
#include "httplib.h"

namespace emotrack::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("emotrack-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::string path() const { return path_.string(); }
  std::string File(const std::string &name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// In-process stand-in for the model adapter: serves the wire protocol
// from any InferenceBackend and counts the inference requests it gets.
class FakeAdapter {
 public:
  explicit FakeAdapter(const InferenceBackend &model, std::string identity = "fake-model-v1")
      : model_(model), identity_(std::move(identity)) {
    server_.Get("/health", [this](const httplib::Request &, httplib::Response &res) {
      res.set_content(Json{{"model", identity_}}.dump(), "application/json");
    });
    server_.Post("/infer", [this](const httplib::Request &req, httplib::Response &res) {
      Handle(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeAdapter() {
    server_.stop();
    thread_.join();
  }

  std::string Url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  long requests() const { return requests_.load(); }
  // The next `n` inference requests get an HTTP `status` reply.
  void FailNext(int n, int status = 503) {
    std::lock_guard<std::mutex> lock(mu_);
    fail_next_ = n;
    fail_status_ = status;
  }
  // Every reply to word_prob carries this probability instead.
  void ForceProb(double p) {
    std::lock_guard<std::mutex> lock(mu_);
    forced_prob_ = p;
  }

 private:
  void Handle(const httplib::Request &req, httplib::Response &res) {
    ++requests_;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (fail_next_ > 0) {
        --fail_next_;
        res.status = fail_status_;
        return;
      }
    }
    Json reply;
    try {
      Json r = Json::parse(req.body);
      auto dim = ParseDimension(r.at("dimension").get<std::string>());
      if (!dim) throw std::invalid_argument("unknown dimension");
      const std::string op = r.at("op").get<std::string>();
      const std::string event = r.at("event").get<std::string>();
      if (op == "generate") {
        reply["generated_text"] = model_.Generate(event, *dim);
      } else if (op == "word_prob") {
        std::lock_guard<std::mutex> lock(mu_);
        reply["prob"] = forced_prob_ >= 0 ? forced_prob_
                                          : model_.WordProb(event, *dim,
                                                            r.at("word").get<std::string>());
      } else {
        throw std::invalid_argument("unknown op");
      }
    } catch (const BackendError &e) {
      reply = {{"error", "inference_failed"}, {"detail", e.what()}};
    } catch (const std::exception &e) {
      res.status = 400;
      reply = {{"error", "bad_request"}, {"detail", e.what()}};
    }
    res.set_content(reply.dump(), "application/json");
  }

  const InferenceBackend &model_;
  std::string identity_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<long> requests_{0};
  std::mutex mu_;
  int fail_next_ = 0;
  int fail_status_ = 503;
  double forced_prob_ = -1;
};

// The hand-labelled role conformance corpus.
struct Conformance {
  std::vector<DepGraph> graphs;
  std::map<std::string, std::vector<std::string>> rosters;  // by story id
  // (sentence id, character) -> "actor" | "object" | "absent"
  std::map<std::pair<std::string, std::string>, std::string> labels;
};

inline Conformance LoadConformance(const std::string &data_dir) {
  Conformance c;
  c.graphs = ReadConllu(data_dir + "/conformance.conllu");
  std::istringstream in(ReadFileOrThrow(data_dir + "/conformance_labels.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = Split(line, '\t');
    if (f.size() != 3) throw std::runtime_error("bad label line: " + line);
    c.labels[{f[0], f[1]}] = f[2];
  }
  // Each sentence is scored against its own roster, so rosters are keyed
  // by sentence id and the graphs are relabelled one story per sentence.
  for (DepGraph &g : c.graphs) {
    std::string id = g.sent_id;
    for (const auto &[key, label] : c.labels) {
      if (key.first == id) c.rosters[id].push_back(key.second);
    }
    g.sent_id = id + ":0";
  }
  return c;
}

}  // namespace emotrack::testing

#endif  // EMOTRACK_TESTS_TESTING_H_
