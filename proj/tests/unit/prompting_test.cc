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

#include <gtest/gtest.h>

#include "cnlg/error.h"
#include "cnlg/prompting.h"
#include "fixtures.h"

namespace cnlg {
namespace {

const AppraisalVector kTableOneVector = {true, false, true, false, false, true, false};

TEST(Prompt, TableOneStrings) {
  EXPECT_EQ(BuildPrompt(Condition::E(Emotion::kJoy), "Last day I"), "generate joy: Last day I");
  EXPECT_EQ(BuildPrompt(Condition::EA(Emotion::kJoy, kTableOneVector), "Last day I"),
            "generate joy attention NoRESP control NoCIRC NoPLEA effort NoCERT: Last day I");
  EXPECT_EQ(BuildPrompt(Condition::A(kTableOneVector), "Last day I"),
            "generate attention NoRESP control NoCIRC NoPLEA effort NoCERT: Last day I");
  EXPECT_EQ(BuildPrompt(Condition::E(Emotion::kJoy), "I felt"), "generate joy: I felt");
}

TEST(Prompt, OffTokens) {
  EXPECT_EQ(RenderAppraisalTokens(AppraisalVector{}),
            "NoATTE NoRESP NoCONT NoCIRC NoPLEA NoEFFORT NoCERT");
  AppraisalVector all;
  all.fill(true);
  EXPECT_EQ(RenderAppraisalTokens(all),
            "attention responsibility control circumstance pleasantness effort certainty");
  const bool six_arr[6] = {};
  EXPECT_THROW(RenderAppraisalTokens(std::span<const bool>(six_arr, 6)), UsageError);
}

TEST(Prompt, GuildSpelling) {
  EXPECT_EQ(RenderCondition(Condition::E(Emotion::kGuilt)), "guilt");
  EXPECT_EQ(RenderCondition(Condition::E(Emotion::kGuilt), {true}), "guild");
  // Both spellings parse back to guilt.
  EXPECT_EQ(ParsePrompt("generate guild: I was").condition.emotion, Emotion::kGuilt);
}

TEST(Prompt, RoundTripEveryCondition) {
  // All 7 + 7*128 + 127 well-formed conditions.
  std::vector<Condition> all;
  for (Emotion e : kAllEmotions) all.push_back(Condition::E(e));
  for (unsigned bits = 0; bits < 128; ++bits) {
    AppraisalVector v{};
    for (std::size_t i = 0; i < kNumAppraisals; ++i) v[i] = (bits >> i) & 1u;
    for (Emotion e : kAllEmotions) all.push_back(Condition::EA(e, v));
    all.push_back(Condition::A(v));
  }
  for (const auto& c : all) {
    const std::string p = BuildPrompt(c, "When  I ");
    const ParsedPrompt parsed = ParsePrompt(p);
    EXPECT_EQ(parsed.condition, c) << p;
    EXPECT_EQ(parsed.trigger, "When I");
    EXPECT_EQ(ConditionFromJson(ToJson(c)), c);
  }
}

TEST(Prompt, Rejections) {
  EXPECT_THROW(BuildPrompt(Condition::E(Emotion::kJoy), "   "), UsageError);
  EXPECT_THROW(ParsePrompt("make joy: x"), UsageError);
  EXPECT_THROW(ParsePrompt("generate joy x"), UsageError);
  EXPECT_THROW(ParsePrompt("generate : x"), UsageError);
  EXPECT_THROW(ParsePrompt("generate joy attention: x"), UsageError);
  EXPECT_THROW(ParsePrompt("generate joy NoRESP attention control NoCIRC NoPLEA effort NoCERT: x"),
               UsageError);
  Condition bad{Config::kE, Emotion::kJoy, kTableOneVector};
  EXPECT_THROW(bad.Validate(), UsageError);
  EXPECT_THROW((Condition{Config::kA, std::nullopt, std::nullopt}.Validate()), UsageError);
}

TEST(Prompt, SliceTrigger) {
  const TriggerSlice s = SliceTrigger("Last day I was very relaxed.", 3);
  EXPECT_EQ(s.trigger, "Last day I");
  EXPECT_EQ(s.target, "was very relaxed.");
  EXPECT_THROW(SliceTrigger("one two", 2), UsageError);
  EXPECT_THROW(SliceTrigger("one two", 0), UsageError);
}

TEST(Prompt, ConditionForRecord) {
  EventRecord r;
  r.emotion = Emotion::kFear;
  r.appraisals = kTableOneVector;
  EXPECT_EQ(ConditionFor(r, Config::kE), Condition::E(Emotion::kFear));
  EXPECT_EQ(ConditionFor(r, Config::kEA), Condition::EA(Emotion::kFear, kTableOneVector));
  EXPECT_EQ(ConditionFor(r, Config::kA), Condition::A(kTableOneVector));
}

TEST(Prompt, InstanceJsonRoundTrip) {
  const auto records = testing::RandomRecords(30, 9);
  const auto inst = Augment(records, Config::kEA, 4);
  testing::TempDir dir;
  WritePromptInstances(dir / "p.jsonl", inst);
  EXPECT_EQ(ReadPromptInstances(dir / "p.jsonl"), inst);
}

}  // namespace
}  // namespace cnlg
