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

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <set>

#include "cnlg/error.h"
#include "cnlg/humaneval.h"
#include "fixtures.h"

namespace cnlg {
namespace {

// Everything 1 except the attention checks, which are answered correctly.
Response Blank(const std::string& item, const std::string& annotator) {
  Response r;
  r.item_id = item;
  r.annotator = annotator;
  for (const auto& s : StatementCatalog::Default().statements) r.ratings[s.id] = 1;
  for (const auto& s : StatementCatalog::Default().attention_checks) r.ratings[s.id] = *s.expected;
  return r;
}

Response With(Response r, std::initializer_list<std::pair<const char*, int>> ratings) {
  for (const auto& [id, v] : ratings) r.ratings.at(id) = v;
  return r;
}

TEST(Catalog, Default) {
  const auto& c = StatementCatalog::Default();
  EXPECT_EQ(c.statements.size(), 21u);
  ASSERT_EQ(c.attention_checks.size(), 2u);
  EXPECT_EQ(*c.attention_checks[0].expected, 4);
  EXPECT_EQ(*c.attention_checks[1].expected, 5);
  EXPECT_EQ(c.scale.size(), 5u);
  EXPECT_EQ(c.statements.front().id, "emotion.anger");
  EXPECT_EQ(c.Find("appraisal.certainty")->section, StatementSection::kAppraisal);
  EXPECT_EQ(c.Find("nope"), nullptr);
  for (const auto& id : StatementCatalog::QualityIds()) EXPECT_TRUE(c.Find(id)) << id;
  Json broken = Json::parse(ReadFile(std::filesystem::path(CNLG_DATA_DIR) /
                                     "survey_statements.json"));
  broken["attention_checks"].erase(0);
  EXPECT_THROW(StatementCatalog::FromJson(broken), DataError);
}

TEST(Origins, Names) {
  for (Origin o : kAllOrigins) EXPECT_EQ(ParseOrigin(OriginName(o)), o);
  EXPECT_EQ(ParseOrigin("ea:efa"), Origin::kEaEfa);
  EXPECT_FALSE(ParseOrigin("E:EfA"));
}

TEST(Aggregate, HandComputedLabels) {
  const std::vector<Response> responses = {
      With(Blank("i1", "a1"), {{"emotion.joy", 5}, {"emotion.sadness", 4}, {"emotion.fear", 2},
                               {"appraisal.pleasantness", 5}, {"appraisal.attention", 4},
                               {"quality.fluent", 5}}),
      With(Blank("i1", "a2"), {{"emotion.joy", 4}, {"emotion.sadness", 5}, {"emotion.fear", 4},
                               {"appraisal.pleasantness", 5}, {"appraisal.attention", 2},
                               {"quality.fluent", 4}}),
      With(Blank("i1", "a3"), {{"emotion.joy", 3}, {"emotion.sadness", 4}, {"emotion.fear", 5},
                               {"appraisal.pleasantness", 1}, {"appraisal.attention", 3},
                               {"quality.fluent", 3}}),
  };
  const AggregateResult r = Aggregate(responses);
  ASSERT_EQ(r.items.size(), 1u);
  const ItemLabels& l = r.items[0];
  // joy 1,1,0 -> 1; sadness 1,1,1 -> 1; fear 0,1,1 -> 1; anger 0,0,0 -> 0.
  EXPECT_TRUE(l.emotion_labels[Index(Emotion::kJoy)]);
  EXPECT_TRUE(l.emotion_labels[Index(Emotion::kSadness)]);
  EXPECT_TRUE(l.emotion_labels[Index(Emotion::kFear)]);
  EXPECT_FALSE(l.emotion_labels[Index(Emotion::kAnger)]);
  EXPECT_DOUBLE_EQ(l.emotion_mean_rating[Index(Emotion::kSadness)], 13.0 / 3);
  EXPECT_DOUBLE_EQ(l.emotion_mean_rating[Index(Emotion::kJoy)], 4.0);
  // Sadness has the highest mean among the labelled emotions.
  EXPECT_EQ(l.emotion, Emotion::kSadness);
  EXPECT_TRUE(l.appraisals[Index(Appraisal::kPleasantness)]);
  EXPECT_FALSE(l.appraisals[Index(Appraisal::kAttention)]);
  EXPECT_DOUBLE_EQ(l.quality.at("quality.fluent"), 4.0);
  EXPECT_DOUBLE_EQ(l.quality.at("quality.human"), 1.0);
  EXPECT_TRUE(r.voided_annotators.empty());
  EXPECT_TRUE(r.excluded_items.empty());
}

TEST(Aggregate, TiesAndNoLabelGiveNoEmotion) {
  const std::vector<Response> tie = {
      With(Blank("t", "a"), {{"emotion.joy", 4}, {"emotion.guilt", 4}}),
      With(Blank("t", "b"), {{"emotion.joy", 5}, {"emotion.guilt", 5}}),
      With(Blank("t", "c"), {{"emotion.joy", 1}, {"emotion.guilt", 1}}),
      Blank("n", "a"), Blank("n", "b"), Blank("n", "c")};
  const AggregateResult r = Aggregate(tie);
  ASSERT_EQ(r.items.size(), 2u);
  for (const auto& l : r.items) EXPECT_FALSE(l.emotion) << l.item_id;
  EXPECT_EQ(r.items[0].emotion_labels, (std::array<bool, kNumEmotions>{}));
}

TEST(Aggregate, AttentionFailuresVoidAnnotatorEverywhere) {
  std::vector<Response> rs;
  for (const char* a : {"a", "b", "c"}) rs.push_back(Blank("i1", a));
  rs.push_back(With(Blank("i2", "a"), {{"emotion.joy", 5}}));
  rs.push_back(With(Blank("i2", "b"), {{"emotion.joy", 5}}));
  rs.push_back(With(Blank("i2", "bad"), {{"check.moderately", 5}, {"emotion.joy", 5}}));
  rs.push_back(Blank("i1", "bad"));  // passes here, still voided
  for (const char* a : {"a", "b", "c", "d"}) rs.push_back(Blank("i3", a));
  const AggregateResult r = Aggregate(rs);
  EXPECT_EQ(r.voided_annotators, std::vector<std::string>{"bad"});
  ASSERT_EQ(r.items.size(), 1u);
  EXPECT_EQ(r.items[0].item_id, "i1");
  EXPECT_EQ(r.excluded_items.at("i2"), 2u);
  EXPECT_EQ(r.excluded_items.at("i3"), 4u);
  const Json j = r.ToJson();
  EXPECT_EQ(j["excluded_items"]["i2"], 2);
}

TEST(Aggregate, Rejections) {
  EXPECT_THROW(Aggregate(std::vector<Response>{With(Blank("i", "a"), {{"emotion.joy", 6}})}),
               DataError);
  Response missing = Blank("i", "a");
  missing.ratings.erase("quality.native");
  EXPECT_THROW(Aggregate(std::vector<Response>{missing}), DataError);
  EXPECT_THROW(Aggregate(std::vector<Response>{Blank("i", "a"), Blank("i", "a")}), DataError);
}

TEST(Responses, ParseScaleLabelsAndNumbers) {
  const auto& c = StatementCatalog::Default();
  Table t;
  t.header = {"item_id", "annotator"};
  std::vector<std::string> row = {"item-001", "w1"};
  for (const auto& s : c.statements) {
    t.header.push_back(s.id);
    row.push_back("not at all");
  }
  t.header.push_back("check.moderately");
  row.push_back("Moderately");
  t.header.push_back("check.extremely");
  row.push_back(" 5 ");
  row[2] = "Extremely";
  row[3] = "3";
  t.rows.push_back(row);
  const auto rs = ParseResponses(t);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].ratings.at("emotion.anger"), 5);
  EXPECT_EQ(rs[0].ratings.at("emotion.disgust"), 3);
  EXPECT_EQ(rs[0].ratings.at("emotion.fear"), 1);
  EXPECT_EQ(rs[0].ratings.at("check.moderately"), 4);
  EXPECT_EQ(rs[0].ratings.at("check.extremely"), 5);

  Table bad = t;
  bad.rows[0][4] = "4x";
  EXPECT_THROW(ParseResponses(bad), DataError);
  Table short_cols = t;
  short_cols.header[5] = "other";
  EXPECT_THROW(ParseResponses(short_cols), DataError);
}

TEST(Agreement, HandValues) {
  GoldCandidate g;
  g.record.emotion = Emotion::kJoy;
  g.record.appraisals = *ParseBitString("1000000");
  EXPECT_FALSE(Agreement(g));
  g.validations.push_back({Emotion::kJoy, *ParseBitString("1100000")});
  EXPECT_DOUBLE_EQ(*Agreement(g), 7.0 / 8);
  g.validations.push_back({Emotion::kFear, *ParseBitString("0000000")});
  // Pairs: 7/8, 6/8, 5/8.
  EXPECT_DOUBLE_EQ(*Agreement(g), 0.75);
}

TEST(Validations, ReadFile) {
  testing::TempDir dir;
  WriteFileAtomic(dir / "v.jsonl",
                  "{\"id\":\"r1\",\"emotion\":\"joy\",\"appraisals\":{\"attention\":5,"
                  "\"effort\":true,\"control\":2}}\n"
                  "{\"id\":\"r1\",\"emotion\":\"fear\",\"appraisals\":{}}\n");
  const auto v = ReadValidations(dir / "v.jsonl");
  ASSERT_EQ(v.at("r1").size(), 2u);
  EXPECT_EQ(BitString(v.at("r1")[0].appraisals), "1000010");
  EXPECT_EQ(v.at("r1")[1].emotion, Emotion::kFear);
  WriteFileAtomic(dir / "bad.jsonl", "{\"id\":\"r\",\"emotion\":\"awe\",\"appraisals\":{}}\n");
  EXPECT_THROW(ReadValidations(dir / "bad.jsonl"), DataError);
}

std::map<Origin, std::vector<GenerationResult>> Cells(std::size_t per_origin) {
  std::map<Origin, std::vector<GenerationResult>> cells;
  for (Origin o : {Origin::kEEp, Origin::kEaEp, Origin::kEaEfa}) {
    for (std::size_t i = 0; i < per_origin; ++i) {
      GenerationResult r;
      r.index = i;
      const Emotion e = kAllEmotions[i % kNumEmotions];
      r.condition = o == Origin::kEEp ? Condition::E(e) : Condition::EA(e, AppraisalVector{});
      r.candidates = {{fmt::format("{} text {}", OriginName(o), i), 0}, {"", -1}};
      cells[o].push_back(r);
    }
  }
  return cells;
}

std::vector<GoldCandidate> Gold(std::size_t n) {
  std::vector<GoldCandidate> gold;
  for (auto& r : testing::RandomRecords(n, 5)) {
    GoldCandidate g;
    g.record = r;
    g.validations.push_back({r.emotion, r.appraisals});
    gold.push_back(g);
  }
  return gold;
}

TEST(Study, SampleCountsAndStatementOrder) {
  const auto gold = Gold(45);
  const auto items = SampleStudy(Cells(120), gold, 11);
  ASSERT_EQ(items.size(), 330u);
  std::map<Origin, std::size_t> per;
  std::set<std::string> ids, texts;
  for (const auto& it : items) {
    ++per[it.origin];
    ids.insert(it.id);
    texts.insert(it.text);
    EXPECT_FALSE(it.text.empty());
    ASSERT_EQ(it.statement_order.size(), 23u);
    EXPECT_EQ(std::set<std::string>(it.statement_order.begin(), it.statement_order.end()).size(),
              23u);
    EXPECT_EQ(it.statement_order[it.check_positions[0]], "check.moderately");
    EXPECT_EQ(it.statement_order[it.check_positions[1]], "check.extremely");
    ASSERT_TRUE(it.gold_emotion);
    if (it.origin == Origin::kEEp) EXPECT_FALSE(it.gold_appraisals);
    if (it.origin == Origin::kHuman) EXPECT_TRUE(it.gold_appraisals);
  }
  EXPECT_EQ(per[Origin::kHuman], 30u);
  EXPECT_EQ(per[Origin::kEEp], 100u);
  EXPECT_EQ(per[Origin::kEaEp], 100u);
  EXPECT_EQ(per[Origin::kEaEfa], 100u);
  EXPECT_EQ(ids.size(), 330u);
  EXPECT_EQ(texts.size(), 330u);
  EXPECT_TRUE(ids.count("item-001"));

  const auto again = SampleStudy(Cells(120), gold, 11);
  for (std::size_t i = 0; i < items.size(); ++i) EXPECT_EQ(again[i].ToJson(), items[i].ToJson());
  EXPECT_NE(SampleStudy(Cells(120), gold, 12)[0].ToJson(), items[0].ToJson());
}

TEST(Study, ShortPoolsAreNamed) {
  try {
    SampleStudy(Cells(50), Gold(10), 1);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("EA:EfA has 50"), std::string::npos) << msg;
    EXPECT_NE(msg.find("gold pool has 10"), std::string::npos) << msg;
  }
}

TEST(Study, ExportAndReadBack) {
  const auto items = SampleStudy(Cells(100), Gold(30), 3);
  testing::TempDir dir;
  ExportSurvey(items, dir.path(), 100);
  const auto back = ReadStudy(dir.path());
  ASSERT_EQ(back.size(), items.size());
  for (std::size_t i = 0; i < items.size(); ++i) EXPECT_EQ(back[i].ToJson(), items[i].ToJson());
  std::size_t rows = 0;
  for (int b = 1; b <= 4; ++b) {
    const Table t = ReadTable(dir / fmt::format("survey_batch_{:03d}.csv", b));
    EXPECT_EQ(t.header.size(), 4u + 23u);
    EXPECT_GE(t.ColumnIndex("check.extremely"), 0);
    rows += t.rows.size();
  }
  EXPECT_EQ(rows, 330u);
  EXPECT_FALSE(std::filesystem::exists(dir / "survey_batch_005.csv"));
  EXPECT_THROW(ExportSurvey(items, dir.path(), 0), UsageError);
}

// Annotators who rate exactly the generation condition reproduce it, so
// human F1 is 1 for every origin.
TEST(HumanF1, AnnotationsEqualConditions) {
  std::vector<SurveyItem> items;
  std::vector<Response> responses;
  int n = 0;
  for (Origin o : kAllOrigins) {
    for (Emotion e : kAllEmotions) {
      SurveyItem it;
      it.id = fmt::format("item-{:03d}", ++n);
      it.origin = o;
      it.gold_emotion = e;
      AppraisalVector v{};
      v[Index(e)] = true;
      v[(Index(e) + 3) % kNumAppraisals] = true;
      if (o != Origin::kEEp) it.gold_appraisals = v;
      items.push_back(it);
      for (int a = 0; a < 3; ++a) {
        Response r = Blank(it.id, fmt::format("w{}", a));
        r.ratings.at(StatementCatalog::EmotionId(e)) = 4 + a % 2;
        for (Appraisal ap : kAllAppraisals) {
          if (v[Index(ap)]) r.ratings.at(StatementCatalog::AppraisalId(ap)) = 5;
        }
        r.ratings.at("quality.machine") = 1 + (n + a) % 5;
        r.ratings.at("quality.human") = 5 - (n + a) % 5;
        responses.push_back(r);
      }
    }
  }
  const AggregateResult agg = Aggregate(responses);
  ASSERT_EQ(agg.items.size(), 28u);
  const HumanEvalReport rep = HumanF1(agg.items, items);
  ASSERT_EQ(rep.emotion.size(), 4u);
  for (const auto& row : rep.emotion) {
    EXPECT_EQ(row.n_texts, 7u);
    ASSERT_TRUE(row.macro_f1) << row.cell.ToString();
    EXPECT_DOUBLE_EQ(*row.macro_f1, 1.0);
    if (row.cell.config != "E") {
      ASSERT_TRUE(row.appraisal_macro_f1);
      EXPECT_DOUBLE_EQ(*row.appraisal_macro_f1, 1.0);
    } else {
      EXPECT_FALSE(row.appraisal_macro_f1);
    }
  }
  EXPECT_EQ(rep.emotion[0].cell.config, "Hum.");
  ASSERT_TRUE(rep.machine_human_correlation);
  EXPECT_NEAR(*rep.machine_human_correlation, -1.0, 1e-12);
  EXPECT_DOUBLE_EQ(rep.quality.at(Origin::kHuman).at("quality.fluent"), 1.0);
  const std::string table = RenderQualityTable(rep);
  EXPECT_NE(table.find("Realistic"), std::string::npos);
  EXPECT_NE(table.find("EA:EfA"), std::string::npos);
}

TEST(HumanF1, MissedEmotionsCountAgainstRecall) {
  SurveyItem a, b;
  a.id = "a";
  a.gold_emotion = Emotion::kJoy;
  b.id = "b";
  b.gold_emotion = Emotion::kJoy;
  ItemLabels la, lb;
  la.item_id = "a";
  la.emotion = Emotion::kJoy;
  lb.item_id = "b";  // tie, no emotion
  const std::vector<SurveyItem> items = {a, b};
  const std::vector<ItemLabels> labels = {la, lb};
  const auto rep = HumanF1(labels, items);
  ASSERT_EQ(rep.emotion.size(), 1u);
  // Precision 1, recall 1/2.
  EXPECT_NEAR(*rep.emotion[0].macro_f1, 2.0 / 3, 1e-12);
  EXPECT_FALSE(rep.machine_human_correlation);
  EXPECT_FALSE(rep.warnings.empty());
}

}  // namespace
}  // namespace cnlg
