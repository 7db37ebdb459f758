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

#ifndef CNLG_PROMPTING_H_
#define CNLG_PROMPTING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnlg/corpus.h"
#include "cnlg/io.h"
#include "cnlg/types.h"

namespace cnlg {

// What a generator is conditioned on. E carries only an emotion, A only an
// appraisal vector, EA both.
struct Condition {
  Config config = Config::kE;
  std::optional<Emotion> emotion;
  std::optional<AppraisalVector> appraisals;

  static Condition E(Emotion e) { return {Config::kE, e, std::nullopt}; }
  static Condition EA(Emotion e, const AppraisalVector& v) {
    return {Config::kEA, e, v};
  }
  static Condition A(const AppraisalVector& v) {
    return {Config::kA, std::nullopt, v};
  }

  // Throws UsageError when the fields do not match the configuration.
  void Validate() const;

  bool operator==(const Condition&) const = default;
};

Json ToJson(const Condition& c);
Condition ConditionFromJson(const Json& j);

struct RenderOptions {
  // Emit "guild" for the guilt class, as printed in the original token list.
  bool literal_guild_token = false;
};

// Seven space-separated tokens: the lowercase appraisal name for an on slot,
// its off-token (NoATTE, NoRESP, ...) otherwise.
std::string RenderAppraisalTokens(std::span<const bool> appraisals);

// Condition segment of a prompt, e.g. "joy attention NoRESP ...".
std::string RenderCondition(const Condition& c, RenderOptions options = {});

// "generate {condition}: {trigger}".
std::string BuildPrompt(const Condition& c, std::string_view trigger,
                        RenderOptions options = {});

struct ParsedPrompt {
  Condition condition;
  std::string trigger;
};

// Inverse of BuildPrompt. Throws UsageError on anything outside the grammar.
ParsedPrompt ParsePrompt(std::string_view prompt);

struct TriggerSlice {
  std::string trigger;
  std::string target;
};

// First n words as trigger, the rest as target. Requires 1 <= n < words.
TriggerSlice SliceTrigger(std::string_view text, int n);

// One fine-tuning (input, target) pair.
struct PromptInstance {
  std::string input;
  std::string target;
  std::string source_id;
  int n = 0;
  Condition condition;

  bool operator==(const PromptInstance&) const = default;
};

Json ToJson(const PromptInstance& p);
PromptInstance PromptInstanceFromJson(const Json& j);
std::vector<PromptInstance> ReadPromptInstances(const std::filesystem::path& path);
void WritePromptInstances(const std::filesystem::path& path,
                          std::span<const PromptInstance> instances);

// Condition carried by a labeled record under a configuration.
Condition ConditionFor(const EventRecord& record, Config config);

inline constexpr int kMinDuplicates = 2;
inline constexpr int kMaxDuplicates = 5;
inline constexpr int kMaxTriggerWords = 9;

struct AugmentOptions {
  RenderOptions render;
  // Skipped records are reported here when non-null.
  std::vector<std::string>* diagnostics = nullptr;
};

// Duplicates every record t times (t drawn from [2, 5]) with pairwise
// distinct trigger lengths n drawn from [1, min(9, words - 1)]. When fewer
// lengths exist than t, t shrinks to the number available. Randomness is
// keyed by record id, so the output does not depend on iteration order.
std::vector<PromptInstance> Augment(std::span<const EventRecord> records,
                                    Config config, std::uint64_t seed,
                                    const AugmentOptions& options = {});

}  // namespace cnlg

#endif  // CNLG_PROMPTING_H_
