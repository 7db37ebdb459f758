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

#ifndef CNLG_HUMANEVAL_H_
#define CNLG_HUMANEVAL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnlg/corpus.h"
#include "cnlg/evaluators.h"
#include "cnlg/generator.h"
#include "cnlg/io.h"
#include "cnlg/prompting.h"

namespace cnlg {

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;
inline constexpr std::size_t kStudyItemsPerCell = 100;
inline constexpr std::size_t kStudyGoldItems = 30;
inline constexpr std::size_t kAnnotatorsPerItem = 3;

enum class StatementSection { kEmotion, kAppraisal, kQuality, kAttentionCheck };

struct Statement {
  std::string id;
  std::string text;
  StatementSection section = StatementSection::kQuality;
  // Demanded rating, attention checks only.
  std::optional<int> expected;
};

struct StatementCatalog {
  std::vector<std::string> scale;
  std::map<StatementSection, std::string> headers;
  // Emotion, appraisal and quality statements in survey order.
  std::vector<Statement> statements;
  std::vector<Statement> attention_checks;

  // The catalog compiled into the library.
  static const StatementCatalog& Default();
  static StatementCatalog FromJson(const Json& j);

  const Statement* Find(std::string_view id) const;
  static std::string EmotionId(Emotion e);
  static std::string AppraisalId(Appraisal a);
  static std::vector<std::string> QualityIds();
};

// Where a survey text comes from.
enum class Origin { kHuman, kEEp, kEaEp, kEaEfa };
inline constexpr std::array<Origin, 4> kAllOrigins = {Origin::kHuman, Origin::kEEp,
                                                      Origin::kEaEp, Origin::kEaEfa};
// "human", "E:EP", "EA:EP", "EA:EfA".
std::string_view OriginName(Origin o);
std::optional<Origin> ParseOrigin(std::string_view name);

struct SurveyItem {
  std::string id;
  std::string text;
  Origin origin = Origin::kHuman;
  // Labels F1 is computed against: the generation condition, or the
  // writer's own labels for corpus texts.
  std::optional<Emotion> gold_emotion;
  std::optional<AppraisalVector> gold_appraisals;
  // Generation cell and index, or corpus record id.
  std::string source;
  std::uint64_t order_seed = 0;
  // 21 statements with the two attention checks spliced in.
  std::vector<std::string> statement_order;
  std::array<std::size_t, 2> check_positions{};

  Json ToJson() const;
  static SurveyItem FromJson(const Json& j);
};

// One reader's guess on a corpus text during the original validation round.
struct Validation {
  Emotion emotion = Emotion::kAnger;
  AppraisalVector appraisals{};
};

struct GoldCandidate {
  EventRecord record;
  std::vector<Validation> validations;
};

// JSONL, one validation per line: {"id", "emotion", "appraisals"} where the
// appraisals map holds booleans or 1..5 ratings (discretized).
std::map<std::string, std::vector<Validation>> ReadValidations(
    const std::filesystem::path& path);

// Mean pairwise agreement over the writer and all readers, each pair scored
// on emotion plus the seven appraisals. nullopt without validations.
std::optional<double> Agreement(const GoldCandidate& candidate);

struct StudyOptions {
  std::size_t per_cell = kStudyItemsPerCell;
  std::size_t gold = kStudyGoldItems;
};

// 100 candidates from each generated origin plus the 30 highest-agreement
// corpus texts, shuffled and numbered. Throws DataError naming the short
// pools when there are not enough texts.
std::vector<SurveyItem> SampleStudy(
    const std::map<Origin, std::vector<GenerationResult>>& cells,
    std::span<const GoldCandidate> gold, std::uint64_t seed,
    const StudyOptions& options = {});

// study.json with every item plus one CSV per batch holding item text,
// order seed, statement order and empty answer columns.
void ExportSurvey(std::span<const SurveyItem> items, const std::filesystem::path& dir,
                  std::size_t batch_size = 30,
                  const StatementCatalog& catalog = StatementCatalog::Default());
std::vector<SurveyItem> ReadStudy(const std::filesystem::path& dir);

// One annotator's ratings on one item, keyed by statement id.
struct Response {
  std::string item_id;
  std::string annotator;
  std::map<std::string, int> ratings;
};

// Columns item_id, annotator, then one column per statement id. Cells hold
// 1..5 or a scale label.
std::vector<Response> ReadResponses(const std::filesystem::path& path,
                                    const StatementCatalog& catalog =
                                        StatementCatalog::Default());
std::vector<Response> ParseResponses(const Table& table, const StatementCatalog& catalog =
                                                             StatementCatalog::Default());

struct ItemLabels {
  std::string item_id;
  // Majority of the discretized ratings.
  std::array<bool, kNumEmotions> emotion_labels{};
  AppraisalVector appraisals{};
  std::array<double, kNumEmotions> emotion_mean_rating{};
  // Highest mean raw rating among the emotions labelled 1; nullopt on a tie
  // or when none is labelled.
  std::optional<Emotion> emotion;
  // Raw means, keyed by quality statement id.
  std::map<std::string, double> quality;
};

struct AggregateResult {
  std::vector<ItemLabels> items;
  std::vector<std::string> voided_annotators;
  // Items without exactly three valid responses.
  std::map<std::string, std::size_t> excluded_items;

  Json ToJson() const;
};

// Annotators failing any attention check are dropped everywhere. Throws
// DataError on ratings outside 1..5 or missing statements.
AggregateResult Aggregate(std::span<const Response> responses,
                          const StatementCatalog& catalog = StatementCatalog::Default());

struct HumanEvalReport {
  // One row per origin present in the labels.
  std::vector<EvaluationReport> emotion;
  std::map<Origin, std::map<std::string, double>> quality;
  // Item-level correlation of the machine and human authorship statements.
  std::optional<double> machine_human_correlation;
  std::vector<std::string> warnings;

  Json ToJson() const;
};

HumanEvalReport HumanF1(std::span<const ItemLabels> labels,
                        std::span<const SurveyItem> items);

// Quality rows of "Fluent Grammar Native Coherent Realistic Machine Human".
std::string RenderQualityTable(const HumanEvalReport& report);

}  // namespace cnlg

#endif  // CNLG_HUMANEVAL_H_
