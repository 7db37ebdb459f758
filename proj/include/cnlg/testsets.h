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

#ifndef CNLG_TESTSETS_H_
#define CNLG_TESTSETS_H_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnlg/corpus.h"
#include "cnlg/prompting.h"

namespace cnlg {

// The thirteen most frequent openings of the event descriptions, used as
// trigger phrases for every inference prompt set.
inline constexpr std::array<std::string_view, 13> kTriggerPhrases = {
    "I felt", "When a", "I was",  "When I", "I had",        "I got", "When my",
    "I found", "I went", "I saw", "I did", "When someone", "I am"};

enum class TestSetName { kEP, kEfA, kEnAP, kAP, kCustom };

std::string_view TestSetNameString(TestSetName name);
std::optional<TestSetName> ParseTestSetName(std::string_view name);

struct TestPrompt {
  Condition condition;
  std::string trigger;

  std::string PromptString() const { return BuildPrompt(condition, trigger); }
};

struct TestPromptSet {
  TestSetName name = TestSetName::kCustom;
  std::vector<TestPrompt> prompts;
  std::string provenance;
};

// 13 triggers x 7 emotions, E conditions.
TestPromptSet BuildEp();

enum class EfaRanking {
  // Rank full 7-slot vectors observed with each emotion.
  kVectors,
  // Rank single appraisals by marginal frequency and use them as one-hot
  // vectors. At most seven exist per emotion.
  kMarginal,
};

struct EfaOptions {
  EfaRanking ranking = EfaRanking::kVectors;
  std::size_t top_k = 10;
};

// Per emotion, the top_k appraisal vectors by frequency in `corpus` (ties by
// ascending bit string), crossed with the 13 triggers: 13 x 7 x 10 EA
// prompts. Throws DataError listing every emotion that has too few vectors.
TestPromptSet BuildEfa(std::span<const EventRecord> corpus,
                       EfaOptions options = {});

// The per-emotion ranking BuildEfa uses, exposed for golden checks.
std::vector<std::pair<AppraisalVector, std::size_t>> RankAppraisalVectors(
    std::span<const EventRecord> corpus, Emotion emotion);

// 13 x 7 EA prompts with every appraisal off.
TestPromptSet BuildEnap();

// 13 triggers x (7 one-hot vectors + all off), A conditions.
TestPromptSet BuildAp();

// Arbitrary triggers crossed with arbitrary conditions.
TestPromptSet BuildCustom(std::span<const std::string> triggers,
                          std::span<const Condition> conditions);

// The (model configuration, prompt set) pairs evaluated per architecture:
// E x EP, EA x EP, EA x EfA, EA x EnAP, EA x AP, A x AP.
std::vector<std::pair<Config, TestSetName>> EvaluationGrid();

Json ToJson(TestSetName set, const TestPrompt& p);
TestPrompt TestPromptFromJson(const Json& j);
void WriteTestSet(const std::filesystem::path& path, const TestPromptSet& set);
TestPromptSet ReadTestSet(const std::filesystem::path& path);

}  // namespace cnlg

#endif  // CNLG_TESTSETS_H_
