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

#ifndef CNLG_CORPUS_H_
#define CNLG_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnlg/io.h"
#include "cnlg/types.h"

namespace cnlg {

// One annotated event description after filtering.
struct EventRecord {
  std::string id;
  std::string text;
  Emotion emotion = Emotion::kAnger;
  // Raw ordinal ratings in [1, 5]; nullopt when the source cell was empty.
  std::array<std::optional<int>, kNumAppraisals> appraisal_scores{};
  // appraisals[a] == (appraisal_scores[a] >= 4); missing ratings are false.
  AppraisalVector appraisals{};

  bool operator==(const EventRecord&) const = default;
};

Json ToJson(const EventRecord& record);
EventRecord EventRecordFromJson(const Json& j);

std::vector<EventRecord> ReadRecords(const std::filesystem::path& path);
void WriteRecords(const std::filesystem::path& path,
                  std::span<const EventRecord> records);

// Maps source columns of a crowd-enVENT style export onto the fields used
// here. Loaded from a JSON file (see data/envent_column_map.json).
struct ColumnMap {
  std::string id_column;
  std::string text_column;
  std::string emotion_column;
  // Source column for each of the seven retained appraisals.
  std::array<std::string, kNumAppraisals> appraisal_columns;
  // Every rating column of the export, retained or not. Only used to check
  // that a row carries the full rating block.
  std::vector<std::string> rating_columns;

  static ColumnMap FromJson(const Json& j);
  static ColumnMap Load(const std::filesystem::path& path);
  Json ToJson() const;
};

// Ratings outside [1, 5] throw DataError.
bool Discretize(int score);

struct FilterResult {
  std::vector<EventRecord> records;
  // Human readable reasons for every rejected or patched row.
  std::vector<std::string> diagnostics;
  std::size_t dropped_emotion = 0;
  std::size_t dropped_no_appraisal = 0;
  std::size_t dropped_malformed = 0;
};

// Keeps rows whose emotion is one of the seven and which have at least one
// retained appraisal rated >= 4. The 14 other rating columns are dropped.
FilterResult FilterCorpus(const Table& raw, const ColumnMap& columns);

struct CorpusSplit {
  std::vector<EventRecord> generator_train;
  std::vector<EventRecord> classifier_train;
  std::vector<EventRecord> classifier_eval;
  std::uint64_t seed = 0;
};

struct SplitOptions {
  // Split each emotion separately with the same proportions.
  bool stratified = false;
};

// Seeded shuffle followed by a contiguous partition: floor(15%) classifier
// training, floor(5%) classifier evaluation, the remainder generator
// training. Needs at least 20 records.
CorpusSplit SplitCorpus(std::span<const EventRecord> records, std::uint64_t seed,
                        SplitOptions options = {});

// Per-emotion document counts and emotion/appraisal co-occurrence counts.
struct CorpusStatistics {
  std::array<std::size_t, kNumEmotions> documents{};
  std::array<std::array<std::size_t, kNumAppraisals>, kNumEmotions>
      cooccurrence{};
  std::size_t total = 0;

  std::size_t AppraisalTotal(Appraisal a) const;
  Json ToJson() const;
};

CorpusStatistics ComputeStatistics(std::span<const EventRecord> records);

// The two totals reported for the filtered corpus (in-text and appendix).
inline constexpr std::size_t kReportedTotalInText = 2750;
inline constexpr std::size_t kReportedTotalInTable = 2700;

// Own count next to both reference totals.
Json TotalDiscrepancyReport(std::size_t filtered_total);

}  // namespace cnlg

#endif  // CNLG_CORPUS_H_
