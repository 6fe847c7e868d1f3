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

#ifndef EMOTRACK_EMOTION_H_
#define EMOTRACK_EMOTION_H_

#include <array>
#include <bitset>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emotrack {

// The eight Plutchik basic emotions, in the order used throughout the
// annotation data.
enum class Emotion {
  kSurprise = 0,
  kDisgust,
  kSadness,
  kJoy,
  kAnger,
  kFear,
  kTrust,
  kAnticipation,
};

inline constexpr int kNumEmotions = 8;

inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::kSurprise, Emotion::kDisgust, Emotion::kSadness,
    Emotion::kJoy,      Emotion::kAnger,   Emotion::kFear,
    Emotion::kTrust,    Emotion::kAnticipation,
};

inline constexpr int Index(Emotion e) { return static_cast<int>(e); }

// Lower-case canonical name, e.g. "joy".
std::string_view EmotionName(Emotion e);

// Accepts canonical names case-insensitively. Returns nullopt for anything
// outside the eight emotions.
std::optional<Emotion> ParseEmotion(std::string_view name);

// A subset of the eight emotions.
class EmotionSet {
 public:
  EmotionSet() = default;
  EmotionSet(std::initializer_list<Emotion> emotions) {
    for (Emotion e : emotions) Insert(e);
  }

  static EmotionSet All() {
    EmotionSet s;
    s.bits_.set();
    return s;
  }

  void Insert(Emotion e) { bits_.set(Index(e)); }
  void Erase(Emotion e) { bits_.reset(Index(e)); }
  bool Contains(Emotion e) const { return bits_.test(Index(e)); }
  int Size() const { return static_cast<int>(bits_.count()); }
  bool Empty() const { return bits_.none(); }

  EmotionSet Intersect(const EmotionSet &other) const {
    return EmotionSet(bits_ & other.bits_);
  }
  EmotionSet Minus(const EmotionSet &other) const {
    return EmotionSet(bits_ & ~other.bits_);
  }
  EmotionSet Union(const EmotionSet &other) const {
    return EmotionSet(bits_ | other.bits_);
  }

  // Members in canonical emotion order.
  std::vector<Emotion> Members() const;
  std::vector<std::string> Names() const;

  // Throws std::invalid_argument on a name outside the eight emotions.
  static EmotionSet FromNames(const std::vector<std::string> &names);

  unsigned long Bits() const { return bits_.to_ulong(); }

  friend bool operator==(const EmotionSet &, const EmotionSet &) = default;

 private:
  explicit EmotionSet(std::bitset<kNumEmotions> bits) : bits_(bits) {}

  std::bitset<kNumEmotions> bits_;
};

// Role of a character with respect to one event. Absence is represented by
// the lack of a role record, never by a third enumerator.
enum class Role { kActor = 0, kObject = 1 };

inline constexpr int kNumRoles = 2;
inline constexpr std::array<Role, kNumRoles> kAllRoles = {Role::kActor,
                                                          Role::kObject};

std::string_view RoleName(Role role);  // "actor" / "object"
std::optional<Role> ParseRole(std::string_view name);

}  // namespace emotrack

#endif  // EMOTRACK_EMOTION_H_
