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

#include "cnlg/corpus.h"
#include "cnlg/error.h"
#include "fixtures.h"

namespace cnlg {
namespace {

using testing::kTable8Cooccurrence;
using testing::kTable8Docs;

TEST(Corpus, DiscretizeThreshold) {
  EXPECT_FALSE(Discretize(1));
  EXPECT_FALSE(Discretize(3));
  EXPECT_TRUE(Discretize(4));
  EXPECT_TRUE(Discretize(5));
  EXPECT_THROW(Discretize(0), DataError);
  EXPECT_THROW(Discretize(6), DataError);
}

TEST(Corpus, SyntheticExportReproducesCounts) {
  testing::SyntheticExportCounts expected;
  const Table raw = testing::SyntheticEnventExport(7, &expected);
  const FilterResult r = FilterCorpus(raw, testing::DefaultColumnMap());
  EXPECT_EQ(r.records.size(), expected.kept);
  EXPECT_EQ(r.dropped_emotion, expected.other_emotion);
  EXPECT_EQ(r.dropped_no_appraisal, expected.no_appraisal);
  EXPECT_EQ(r.dropped_malformed, expected.malformed);

  const CorpusStatistics s = ComputeStatistics(r.records);
  EXPECT_EQ(s.total, 2700u);
  for (Emotion e : kAllEmotions) {
    EXPECT_EQ(s.documents[Index(e)], kTable8Docs[Index(e)]) << EmotionName(e);
    for (Appraisal a : kAllAppraisals) {
      EXPECT_EQ(s.cooccurrence[Index(e)][Index(a)], kTable8Cooccurrence[Index(e)][Index(a)])
          << EmotionName(e) << "/" << AppraisalName(a);
    }
  }
  for (Appraisal a : kAllAppraisals) {
    EXPECT_EQ(s.AppraisalTotal(a), testing::kTable8AppraisalTotals[Index(a)]);
  }
}

TEST(Corpus, Table8ColumnTotalsAreConsistent) {
  // The printed totals row is the column sum of the printed rows.
  std::size_t docs = 0;
  for (auto d : kTable8Docs) docs += d;
  EXPECT_EQ(docs, kReportedTotalInTable);
  for (std::size_t a = 0; a < kNumAppraisals; ++a) {
    std::size_t sum = 0;
    for (std::size_t e = 0; e < kNumEmotions; ++e) sum += kTable8Cooccurrence[e][a];
    EXPECT_EQ(sum, testing::kTable8AppraisalTotals[a]);
  }
}

TEST(Corpus, DiscrepancyReported) {
  const Json j = TotalDiscrepancyReport(2700);
  const std::string dump = j.dump();
  EXPECT_NE(dump.find("2750"), std::string::npos);
  EXPECT_NE(dump.find("2700"), std::string::npos);
}

TEST(Corpus, FilterEdgeCases) {
  const ColumnMap map = testing::DefaultColumnMap();
  Table t;
  t.header = {map.id_column, map.text_column, map.emotion_column};
  for (const auto& c : map.rating_columns) t.header.push_back(c);
  auto row = [&](std::string id, std::string text, std::string emo, std::string att) {
    std::vector<std::string> r(t.header.size(), "2");
    r[0] = id;
    r[1] = text;
    r[2] = emo;
    r[static_cast<std::size_t>(t.ColumnIndex(map.appraisal_columns[0]))] = att;
    return r;
  };
  t.rows.push_back(row("a", "I   won\tthe game", "Joy", "4.0"));
  t.rows.push_back(row("b", "  ", "joy", "5"));
  t.rows.push_back(row("c", "it rained", "sadness", "NA"));
  t.rows.push_back(row("d", "it rained", "sadness", "9"));
  const FilterResult r = FilterCorpus(t, map);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].text, "I won the game");
  EXPECT_EQ(r.records[0].emotion, Emotion::kJoy);
  EXPECT_TRUE(r.records[0].appraisals[0]);
  EXPECT_EQ(r.records[0].appraisal_scores[0], 4);
  // "c" has all ratings at 2 and the attention rating missing.
  EXPECT_EQ(r.dropped_no_appraisal, 1u);
  EXPECT_EQ(r.dropped_malformed, 2u);
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Corpus, MissingTextColumnIsDataError) {
  Table t;
  t.header = {"x"};
  EXPECT_THROW(FilterCorpus(t, testing::DefaultColumnMap()), DataError);
}

TEST(Corpus, RecordJsonRoundTrip) {
  const auto records = testing::RandomRecords(20, 5);
  testing::TempDir dir;
  WriteRecords(dir / "r.jsonl", records);
  EXPECT_EQ(ReadRecords(dir / "r.jsonl"), records);
}

TEST(Corpus, SplitPartitionsAndIsSeeded) {
  const auto records = testing::SyntheticCorpus();
  const CorpusSplit a = SplitCorpus(records, 11);
  const CorpusSplit b = SplitCorpus(records, 11);
  const CorpusSplit c = SplitCorpus(records, 12);
  EXPECT_EQ(a.generator_train, b.generator_train);
  EXPECT_NE(a.generator_train, c.generator_train);
  std::set<std::string> ids;
  for (const auto* part : {&a.generator_train, &a.classifier_train, &a.classifier_eval}) {
    EXPECT_FALSE(part->empty());
    for (const auto& r : *part) EXPECT_TRUE(ids.insert(r.id).second) << "overlap " << r.id;
  }
  EXPECT_EQ(ids.size(), records.size());
}

TEST(Corpus, StratifiedSplitKeepsProportions) {
  const auto records = testing::SyntheticCorpus();
  const CorpusSplit s = SplitCorpus(records, 3, {true});
  const CorpusStatistics all = ComputeStatistics(records);
  const CorpusStatistics gen = ComputeStatistics(s.generator_train);
  for (Emotion e : kAllEmotions) {
    const double want = static_cast<double>(all.documents[Index(e)]) / all.total;
    const double got = static_cast<double>(gen.documents[Index(e)]) / gen.total;
    EXPECT_NEAR(got, want, 0.01);
  }
}

}  // namespace
}  // namespace cnlg
