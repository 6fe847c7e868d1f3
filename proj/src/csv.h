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

#ifndef EMOTRACK_SRC_CSV_H_
#define EMOTRACK_SRC_CSV_H_

#include <string>
#include <vector>

namespace emotrack {

struct CsvRow {
  int line = 0;  // 1-based physical line where the row starts
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // -1 when absent.
  int ColumnIndex(const std::string &name) const;
};

// RFC 4180 reader: comma separated, double-quoted fields with "" escapes,
// embedded newlines allowed inside quotes. The first row is the header.
// Throws ParseError on an unterminated quote or a row whose width differs
// from the header.
CsvTable ParseCsv(const std::string &text, const std::string &origin);

}  // namespace emotrack

#endif  // EMOTRACK_SRC_CSV_H_
