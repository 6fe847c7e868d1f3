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

#include <thread>

#include "emotrack/backend.h"
#include "emotrack/errors.h"
#include "httplib.h"

namespace emotrack {

RemoteBackend::Options RemoteBackend::ParseSpec(const std::string &spec) {
  Options options;
  std::string url = spec;
  size_t semi = url.find(";id=");
  if (semi != std::string::npos) {
    options.identity = url.substr(semi + 4);
    url.resize(semi);
  }
  size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("remote backend needs a URL: " + spec);
  size_t slash = url.find('/', scheme + 3);
  if (slash != std::string::npos) {
    options.path = url.substr(slash);
    url.resize(slash);
  }
  options.base_url = url;
  return options;
}

RemoteBackend::RemoteBackend(Options options) : options_(std::move(options)) {
  identity_ = options_.identity;
}

namespace {

void Configure(httplib::Client &client, std::chrono::milliseconds deadline) {
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(deadline);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(deadline - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
}

}  // namespace

std::string RemoteBackend::Identity() const {
  std::lock_guard<std::mutex> lock(identity_mu_);
  if (!identity_.empty()) return identity_;
  httplib::Client client(options_.base_url);
  Configure(client, options_.deadline);
  auto res = client.Get(options_.health_path);
  if (!res) {
    throw BackendError(BackendError::Kind::kTransport,
                       "health check failed: " + httplib::to_string(res.error()));
  }
  try {
    Json body = Json::parse(res->body);
    identity_ = body.at("model").get<std::string>();
  } catch (const Json::exception &) {
    throw BackendError(BackendError::Kind::kProtocol, "malformed health response");
  }
  return identity_;
}

Json RemoteBackend::Call(const Json &request) const {
  httplib::Client client(options_.base_url);
  Configure(client, options_.deadline);
  const std::string body = request.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.backoff * (1 << (attempt - 1)));
    ++inference_calls_;
    auto res = client.Post(options_.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    Json reply;
    try {
      reply = Json::parse(res->body);
    } catch (const Json::parse_error &) {
      throw BackendError(BackendError::Kind::kProtocol, "response is not JSON");
    }
    if (!reply.is_object()) throw BackendError(BackendError::Kind::kProtocol, "response is not an object");
    if (reply.contains("error")) {
      throw BackendError(BackendError::Kind::kProtocol,
                         "adapter error " + reply["error"].dump() + ": " +
                             reply.value("detail", std::string()));
    }
    return reply;
  }
  throw BackendError(BackendError::Kind::kTransport,
                     "request to " + options_.base_url + options_.path + " failed after " +
                         std::to_string(options_.retries) + " retries: " + last_error,
                     options_.retries);
}

std::string RemoteBackend::Generate(const std::string &event, Dimension dimension) const {
  Json reply = Call({{"op", "generate"},
                     {"event", event},
                     {"dimension", std::string(DimensionName(dimension))}});
  if (!reply.contains("generated_text") || !reply["generated_text"].is_string() ||
      reply["generated_text"].get<std::string>().empty()) {
    throw BackendError(BackendError::Kind::kProtocol, "response lacks generated_text");
  }
  return reply["generated_text"].get<std::string>();
}

double RemoteBackend::WordProb(const std::string &event, Dimension dimension,
                               const std::string &word) const {
  Json reply = Call({{"op", "word_prob"},
                     {"event", event},
                     {"dimension", std::string(DimensionName(dimension))},
                     {"word", word}});
  if (!reply.contains("prob") || !reply["prob"].is_number()) {
    throw BackendError(BackendError::Kind::kProtocol, "response lacks prob");
  }
  double p = reply["prob"].get<double>();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw BackendError(BackendError::Kind::kProtocol, "prob outside [0,1]");
  }
  return p;
}

}  // namespace emotrack
