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

#include "emotrack/emotion.h"

#include <stdexcept>

#include "emotrack/text.h"

namespace emotrack {

namespace {

constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "surprise", "disgust", "sadness", "joy",
    "anger",    "fear",    "trust",   "anticipation",
};

}  // namespace

std::string_view EmotionName(Emotion e) { return kEmotionNames[Index(e)]; }

std::optional<Emotion> ParseEmotion(std::string_view name) {
  std::string lower = ToLower(Trim(name));
  for (Emotion e : kAllEmotions) {
    if (lower == EmotionName(e)) return e;
  }
  return std::nullopt;
}

std::vector<Emotion> EmotionSet::Members() const {
  std::vector<Emotion> out;
  for (Emotion e : kAllEmotions) {
    if (Contains(e)) out.push_back(e);
  }
  return out;
}

std::vector<std::string> EmotionSet::Names() const {
  std::vector<std::string> out;
  for (Emotion e : Members()) out.emplace_back(EmotionName(e));
  return out;
}

EmotionSet EmotionSet::FromNames(const std::vector<std::string> &names) {
  EmotionSet s;
  for (const std::string &name : names) {
    auto e = ParseEmotion(name);
    if (!e) throw std::invalid_argument("unknown emotion: " + name);
    s.Insert(*e);
  }
  return s;
}

std::string_view RoleName(Role role) {
  return role == Role::kActor ? "actor" : "object";
}

std::optional<Role> ParseRole(std::string_view name) {
  std::string lower = ToLower(Trim(name));
  if (lower == "actor") return Role::kActor;
  if (lower == "object") return Role::kObject;
  return std::nullopt;
}

}  // namespace emotrack
