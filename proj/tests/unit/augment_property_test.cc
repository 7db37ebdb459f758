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

// Properties of Augment over 1000 random records and every configuration.

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "cnlg/prompting.h"
#include "cnlg/text.h"
#include "fixtures.h"

namespace cnlg {
namespace {

class AugmentProperties : public ::testing::TestWithParam<Config> {
 protected:
  static void SetUpTestSuite() { records_ = testing::RandomRecords(1000, 2024); }
  static std::vector<EventRecord> records_;
};
std::vector<EventRecord> AugmentProperties::records_;

TEST_P(AugmentProperties, Invariants) {
  const Config config = GetParam();
  std::vector<std::string> diagnostics;
  AugmentOptions options;
  options.diagnostics = &diagnostics;
  const auto inst = Augment(records_, config, 99, options);

  std::map<std::string, std::vector<const PromptInstance*>> by_record;
  for (const auto& p : inst) by_record[p.source_id].push_back(&p);

  std::size_t skipped = 0;
  for (const auto& r : records_) {
    const auto words = SplitWords(r.text);
    const auto& group = by_record[r.id];
    if (words.size() < 2) {
      EXPECT_TRUE(group.empty());
      ++skipped;
      continue;
    }
    const int max_n = std::min<int>(kMaxTriggerWords, static_cast<int>(words.size()) - 1);
    const int t = static_cast<int>(group.size());
    EXPECT_GE(t, std::min(kMinDuplicates, max_n)) << r.id;
    EXPECT_LE(t, std::min(kMaxDuplicates, max_n)) << r.id;
    if (max_n >= kMinDuplicates) {
      EXPECT_GE(t, kMinDuplicates);
    }

    std::set<int> ns;
    for (const PromptInstance* p : group) {
      EXPECT_TRUE(ns.insert(p->n).second) << "repeated n for " << r.id;
      EXPECT_GE(p->n, 1);
      EXPECT_LE(p->n, max_n);
      const ParsedPrompt parsed = ParsePrompt(p->input);
      EXPECT_EQ(parsed.condition, ConditionFor(r, config));
      EXPECT_EQ(static_cast<int>(SplitWords(parsed.trigger).size()), p->n);
      EXPECT_EQ(parsed.trigger + " " + p->target, NormalizeWhitespace(r.text));
      EXPECT_FALSE(p->target.empty());

      const std::string cond = p->input.substr(0, p->input.find(": "));
      EXPECT_TRUE(std::none_of(cond.begin(), cond.end(),
                               [](unsigned char c) { return std::isdigit(c); }))
          << cond;
    }
  }
  EXPECT_EQ(diagnostics.size(), skipped);
  EXPECT_GT(skipped, 0u);

  EXPECT_EQ(Augment(records_, config, 99), inst);
  EXPECT_NE(Augment(records_, config, 100), inst);
}

TEST_P(AugmentProperties, PerRecordStreamsAreIndependentOfOrder) {
  std::vector<EventRecord> reversed(records_.rbegin(), records_.rend());
  auto a = Augment(records_, GetParam(), 5);
  auto b = Augment(reversed, GetParam(), 5);
  auto key = [](const PromptInstance& p) { return std::tie(p.source_id, p.n); };
  auto less = [&](const PromptInstance& x, const PromptInstance& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  EXPECT_EQ(a, b);
}

INSTANTIATE_TEST_SUITE_P(AllConfigs, AugmentProperties,
                         ::testing::Values(Config::kE, Config::kEA, Config::kA),
                         [](const auto& info) { return std::string(ConfigName(info.param)); });

TEST(Augment, TwoWordTextYieldsOneSlice) {
  EventRecord r;
  r.id = "x";
  r.text = "I cried";
  r.emotion = Emotion::kSadness;
  r.appraisals[0] = true;
  const auto inst = Augment(std::span(&r, 1), Config::kE, 1);
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst[0].input, "generate sadness: I");
  EXPECT_EQ(inst[0].target, "cried");
}

TEST(Augment, LongTextCapsTriggerLength) {
  EventRecord r;
  r.id = "long";
  for (int i = 0; i < 40; ++i) r.text += "w" + std::string(1, static_cast<char>('a' + i % 26)) + " ";
  r.emotion = Emotion::kJoy;
  r.appraisals[4] = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& p : Augment(std::span(&r, 1), Config::kE, seed)) {
      EXPECT_LE(p.n, kMaxTriggerWords);
    }
  }
}

}  // namespace
}  // namespace cnlg
