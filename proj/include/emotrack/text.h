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

#ifndef EMOTRACK_TEXT_H_
#define EMOTRACK_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace emotrack {

std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);
std::vector<std::string> Split(std::string_view s, char sep);

// 64-bit FNV-1a. Used for stable ids and record checksums, never for
// anything security related.
uint64_t Fnv1a64(std::string_view data);
std::string Hex64(uint64_t value);

// True if a word character: ASCII letter, digit or apostrophe.
bool IsWordChar(char c);

}  // namespace emotrack

#endif  // EMOTRACK_TEXT_H_
