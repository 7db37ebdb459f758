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

#include "cnlg/types.h"

#include "cnlg/text.h"

namespace cnlg {
namespace {

constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "anger", "disgust", "fear", "guilt", "joy", "sadness", "shame"};

constexpr std::array<std::string_view, kNumAppraisals> kAppraisalNames = {
    "attention",    "responsibility", "control",  "circumstance",
    "pleasantness", "effort",         "certainty"};

constexpr std::array<std::string_view, kNumAppraisals> kOffTokens = {
    "NoATTE", "NoRESP", "NoCONT", "NoCIRC", "NoPLEA", "NoEFFORT", "NoCERT"};

}  // namespace

std::string_view EmotionName(Emotion e) { return kEmotionNames[Index(e)]; }

std::optional<Emotion> ParseEmotion(std::string_view name) {
  const std::string lower = ToLower(name);
  for (Emotion e : kAllEmotions) {
    if (lower == EmotionName(e)) return e;
  }
  if (lower == "guild") return Emotion::kGuilt;
  return std::nullopt;
}

std::string_view AppraisalName(Appraisal a) { return kAppraisalNames[Index(a)]; }

std::string_view AppraisalOffToken(Appraisal a) { return kOffTokens[Index(a)]; }

std::optional<Appraisal> ParseAppraisal(std::string_view name) {
  const std::string lower = ToLower(name);
  for (Appraisal a : kAllAppraisals) {
    if (lower == AppraisalName(a)) return a;
  }
  return std::nullopt;
}

std::string_view ConfigName(Config c) {
  switch (c) {
    case Config::kE:
      return "E";
    case Config::kEA:
      return "EA";
    case Config::kA:
      return "A";
  }
  return "?";
}

std::optional<Config> ParseConfig(std::string_view name) {
  if (name == "E") return Config::kE;
  if (name == "EA") return Config::kEA;
  if (name == "A") return Config::kA;
  return std::nullopt;
}

std::string BitString(const AppraisalVector& v) {
  std::string out(kNumAppraisals, '0');
  for (std::size_t i = 0; i < kNumAppraisals; ++i) {
    if (v[i]) out[i] = '1';
  }
  return out;
}

std::optional<AppraisalVector> ParseBitString(std::string_view bits) {
  if (bits.size() != kNumAppraisals) return std::nullopt;
  AppraisalVector v{};
  for (std::size_t i = 0; i < kNumAppraisals; ++i) {
    if (bits[i] == '1') {
      v[i] = true;
    } else if (bits[i] != '0') {
      return std::nullopt;
    }
  }
  return v;
}

}  // namespace cnlg
