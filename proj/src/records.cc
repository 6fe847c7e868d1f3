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

#include "emotrack/records.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "emotrack/errors.h"
#include "emotrack/text.h"

namespace emotrack {

std::string ReadFileOrThrow(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFileOrThrow(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

RecordFile ParseRecordText(const std::string &text, const std::string &origin) {
  RecordFile file;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error &e) {
      throw ParseError(origin, lineno, std::string("bad record: ") + e.what());
    }
    if (!record.is_object() || !record.contains("kind") ||
        !record["kind"].is_string()) {
      throw ParseError(origin, lineno, "record is not an object with a kind");
    }
    if (record["kind"] == "header" && file.records.empty() &&
        file.header.is_null()) {
      file.header = std::move(record);
      continue;
    }
    record["_line"] = lineno;
    file.records.push_back(std::move(record));
  }
  return file;
}

RecordFile ReadRecordFile(const std::string &path) {
  return ParseRecordText(ReadFileOrThrow(path), path);
}

std::string DumpRecord(const Json &record) {
  Json copy = record;
  if (copy.is_object()) copy.erase("_line");
  return copy.dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::string SerializeRecords(const Json &header, const std::vector<Json> &records) {
  std::string out;
  if (!header.is_null()) {
    out += DumpRecord(header);
    out += '\n';
  }
  for (const Json &r : records) {
    out += DumpRecord(r);
    out += '\n';
  }
  return out;
}

void WriteRecordFile(const std::string &path, const Json &header,
                     const std::vector<Json> &records) {
  WriteFileOrThrow(path, SerializeRecords(header, records));
}

}  // namespace emotrack
