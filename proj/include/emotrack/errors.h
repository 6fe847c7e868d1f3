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

#ifndef EMOTRACK_ERRORS_H_
#define EMOTRACK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace emotrack {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input with a file/line locus.
class ParseError : public Error {
 public:
  ParseError(const std::string &file, int line, const std::string &what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string &file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// Bad configuration value (quantile outside (0,100), empty grid, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Type invariants violated by an input artifact.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Corrupted cache or artifact store.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// A stage input (predecessor artifact or referenced file) does not exist.
class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(const std::string &path)
      : Error("missing artifact: " + path), path_(path) {}

  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

// Failure of an inference backend query.
class BackendError : public Error {
 public:
  enum class Kind { kCacheMiss, kTransport, kProtocol };

  BackendError(Kind kind, const std::string &what, int retries = 0)
      : Error(what), kind_(kind), retries_(retries) {}

  Kind kind() const { return kind_; }
  int retries() const { return retries_; }

 private:
  Kind kind_;
  int retries_;
};

}  // namespace emotrack

#endif  // EMOTRACK_ERRORS_H_
