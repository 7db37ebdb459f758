// Copyright 2026 The cnlg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CNLG_TYPES_H_
#define CNLG_TYPES_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace cnlg {

// The seven emotion categories a generator can be conditioned on.
enum class Emotion { kAnger, kDisgust, kFear, kGuilt, kJoy, kSadness, kShame };

inline constexpr std::size_t kNumEmotions = 7;
inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::kAnger, Emotion::kDisgust, Emotion::kFear,   Emotion::kGuilt,
    Emotion::kJoy,   Emotion::kSadness, Emotion::kShame};

// Appraisal dimensions in canonical order. Every appraisal vector, token
// string and column listing in the project follows this order.
enum class Appraisal {
  kAttention,
  kResponsibility,
  kControl,
  kCircumstance,
  kPleasantness,
  kEffort,
  kCertainty
};

inline constexpr std::size_t kNumAppraisals = 7;
inline constexpr std::array<Appraisal, kNumAppraisals> kAllAppraisals = {
    Appraisal::kAttention,    Appraisal::kResponsibility, Appraisal::kControl,
    Appraisal::kCircumstance, Appraisal::kPleasantness,   Appraisal::kEffort,
    Appraisal::kCertainty};

// One on/off slot per appraisal, canonical order.
using AppraisalVector = std::array<bool, kNumAppraisals>;

// Which variables are embedded in a prompt: emotion only, emotion and
// appraisals, or appraisals only.
enum class Config { kE, kEA, kA };

constexpr std::size_t Index(Emotion e) { return static_cast<std::size_t>(e); }
constexpr std::size_t Index(Appraisal a) {
  return static_cast<std::size_t>(a);
}

// Lowercase emotion name, e.g. "guilt".
std::string_view EmotionName(Emotion e);
// Case-insensitive. "guild" is accepted as the guilt class.
std::optional<Emotion> ParseEmotion(std::string_view name);

// Lowercase appraisal name, the on-token, e.g. "responsibility".
std::string_view AppraisalName(Appraisal a);
// Off-token, e.g. "NoRESP".
std::string_view AppraisalOffToken(Appraisal a);
std::optional<Appraisal> ParseAppraisal(std::string_view name);

std::string_view ConfigName(Config c);
std::optional<Config> ParseConfig(std::string_view name);

// "1010010" style rendering, canonical order.
std::string BitString(const AppraisalVector& v);
std::optional<AppraisalVector> ParseBitString(std::string_view bits);

}  // namespace cnlg

#endif  // CNLG_TYPES_H_
