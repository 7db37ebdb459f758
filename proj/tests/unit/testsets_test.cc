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

#include <set>

#include "cnlg/error.h"
#include "cnlg/testsets.h"
#include "fixtures.h"

namespace cnlg {
namespace {

std::size_t SizeOf(TestSetName name, std::span<const EventRecord> corpus) {
  switch (name) {
    case TestSetName::kEP:
      return BuildEp().prompts.size();
    case TestSetName::kEfA:
      return BuildEfa(corpus).prompts.size();
    case TestSetName::kEnAP:
      return BuildEnap().prompts.size();
    case TestSetName::kAP:
      return BuildAp().prompts.size();
    default:
      return 0;
  }
}

TEST(TestSets, Sizes) {
  const auto corpus = testing::SyntheticCorpus();
  EXPECT_EQ(BuildEp().prompts.size(), 91u);
  EXPECT_EQ(BuildEfa(corpus).prompts.size(), 910u);
  EXPECT_EQ(BuildEnap().prompts.size(), 91u);
  EXPECT_EQ(BuildAp().prompts.size(), 104u);

  std::size_t grid = 0;
  for (const auto& [config, set] : EvaluationGrid()) grid += SizeOf(set, corpus);
  EXPECT_EQ(grid, 1391u);
  // Two architectures, five candidates each.
  EXPECT_EQ(grid * 2 * 5, 13910u);
}

TEST(TestSets, Grid) {
  const auto grid = EvaluationGrid();
  ASSERT_EQ(grid.size(), 6u);
  std::set<std::pair<Config, TestSetName>> cells(grid.begin(), grid.end());
  EXPECT_EQ(cells.size(), 6u);
  EXPECT_TRUE(cells.count({Config::kE, TestSetName::kEP}));
  EXPECT_TRUE(cells.count({Config::kA, TestSetName::kAP}));
  EXPECT_FALSE(cells.count({Config::kE, TestSetName::kEfA}));
}

TEST(TestSets, PromptsAreDistinctAndMatchConfig) {
  const auto corpus = testing::SyntheticCorpus();
  const std::vector<std::pair<TestPromptSet, Config>> sets = {
      {BuildEp(), Config::kE},
      {BuildEfa(corpus), Config::kEA},
      {BuildEnap(), Config::kEA},
      {BuildAp(), Config::kA}};
  for (const auto& [set, config] : sets) {
    std::set<std::string> strings;
    for (const auto& p : set.prompts) {
      EXPECT_EQ(p.condition.config, config);
      EXPECT_TRUE(strings.insert(p.PromptString()).second) << p.PromptString();
    }
  }
}

TEST(TestSets, EnapAllOffAndApOneHots) {
  for (const auto& p : BuildEnap().prompts) {
    EXPECT_EQ(*p.condition.appraisals, AppraisalVector{});
  }
  std::size_t all_off = 0;
  for (const auto& p : BuildAp().prompts) {
    const auto& v = *p.condition.appraisals;
    const auto on = std::count(v.begin(), v.end(), true);
    EXPECT_LE(on, 1);
    all_off += on == 0;
  }
  EXPECT_EQ(all_off, kTriggerPhrases.size());
}

TEST(TestSets, EfaUsesMostFrequentVectors) {
  std::vector<EventRecord> corpus;
  int id = 0;
  auto add = [&](Emotion e, const char* bits, int times) {
    for (int i = 0; i < times; ++i) {
      EventRecord r;
      r.id = std::to_string(id++);
      r.text = "x y";
      r.emotion = e;
      r.appraisals = *ParseBitString(bits);
      corpus.push_back(r);
    }
  };
  for (Emotion e : kAllEmotions) {
    add(e, "1000000", 5);
    add(e, "0100000", 3);
    add(e, "0010000", 3);  // tie with the previous one
    add(e, "0001000", 1);
  }
  const auto ranked = RankAppraisalVectors(corpus, Emotion::kJoy);
  ASSERT_EQ(ranked.size(), 4u);
  EXPECT_EQ(BitString(ranked[0].first), "1000000");
  EXPECT_EQ(BitString(ranked[1].first), "0010000");
  EXPECT_EQ(BitString(ranked[2].first), "0100000");

  EfaOptions o;
  o.top_k = 3;
  const auto set = BuildEfa(corpus, o);
  EXPECT_EQ(set.prompts.size(), 13u * 7u * 3u);
  for (const auto& p : set.prompts) {
    EXPECT_NE(BitString(*p.condition.appraisals), "0001000");
  }
  o.top_k = 5;
  EXPECT_THROW(BuildEfa(corpus, o), DataError);
  o.top_k = 10;
  o.ranking = EfaRanking::kMarginal;
  EXPECT_THROW(BuildEfa(testing::SyntheticCorpus(), o), DataError);
}

TEST(TestSets, FileRoundTrip) {
  testing::TempDir dir;
  const TestPromptSet ap = BuildAp();
  WriteTestSet(dir / "ap.jsonl", ap);
  const TestPromptSet back = ReadTestSet(dir / "ap.jsonl");
  EXPECT_EQ(back.name, TestSetName::kAP);
  ASSERT_EQ(back.prompts.size(), ap.prompts.size());
  for (std::size_t i = 0; i < ap.prompts.size(); ++i) {
    EXPECT_EQ(back.prompts[i].condition, ap.prompts[i].condition);
    EXPECT_EQ(back.prompts[i].trigger, ap.prompts[i].trigger);
  }
}

}  // namespace
}  // namespace cnlg
