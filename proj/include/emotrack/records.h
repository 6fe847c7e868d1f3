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

#ifndef EMOTRACK_RECORDS_H_
#define EMOTRACK_RECORDS_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace emotrack {

using Json = nlohmann::json;

// Every persisted artifact is a line-record file: UTF-8, one flat JSON
// object per line, each carrying a "kind" field. The first record, when
// present with kind "header", describes how the file was produced.
struct RecordFile {
  Json header;  // null when the file has no header record
  std::vector<Json> records;
};

// Throws ParseError (with line number) on malformed lines and
// std::runtime_error if the file cannot be opened.
RecordFile ReadRecordFile(const std::string &path);
RecordFile ParseRecordText(const std::string &text, const std::string &origin);

// Serializes deterministically: keys sorted, compact separators, "\n" after
// every record.
std::string SerializeRecords(const Json &header, const std::vector<Json> &records);
void WriteRecordFile(const std::string &path, const Json &header,
                     const std::vector<Json> &records);

std::string DumpRecord(const Json &record);

// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string ReadFileOrThrow(const std::string &path);
void WriteFileOrThrow(const std::string &path, const std::string &content);

}  // namespace emotrack

#endif  // EMOTRACK_RECORDS_H_
