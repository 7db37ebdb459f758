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

#include "cnlg/corpus.h"

#include <spdlog/spdlog.h>

#include <charconv>

#include "cnlg/error.h"
#include "cnlg/random.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

std::optional<int> ParseRating(std::string_view cell) {
  cell = Trim(cell);
  int value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    // crowd-enVENT stores some ratings as "4.0".
    double d = 0;
    auto [dptr, dec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), d);
    if (dec != std::errc() || dptr != cell.data() + cell.size() ||
        d != static_cast<int>(d)) {
      return std::nullopt;
    }
    value = static_cast<int>(d);
  }
  return value;
}

bool IsMissingCell(std::string_view cell) {
  cell = Trim(cell);
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

void Log(std::vector<std::string>& diagnostics, std::string message) {
  spdlog::debug("{}", message);
  diagnostics.push_back(std::move(message));
}

}  // namespace

Json ToJson(const EventRecord& record) {
  Json scores = Json::object();
  Json flags = Json::object();
  for (Appraisal a : kAllAppraisals) {
    const auto& s = record.appraisal_scores[Index(a)];
    scores[std::string(AppraisalName(a))] = s ? Json(*s) : Json(nullptr);
    flags[std::string(AppraisalName(a))] = record.appraisals[Index(a)];
  }
  Json j;
  j["id"] = record.id;
  j["text"] = record.text;
  j["emotion"] = std::string(EmotionName(record.emotion));
  j["appraisal_scores"] = std::move(scores);
  j["appraisals"] = std::move(flags);
  return j;
}

EventRecord EventRecordFromJson(const Json& j) {
  EventRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    const auto emotion = ParseEmotion(j.at("emotion").get<std::string>());
    if (!emotion) throw DataError("unknown emotion in record " + r.id);
    r.emotion = *emotion;
    const Json& scores = j.at("appraisal_scores");
    for (Appraisal a : kAllAppraisals) {
      const std::string name(AppraisalName(a));
      if (scores.contains(name) && !scores[name].is_null()) {
        const int s = scores[name].get<int>();
        r.appraisal_scores[Index(a)] = s;
        r.appraisals[Index(a)] = Discretize(s);
      }
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
  return r;
}

std::vector<EventRecord> ReadRecords(const std::filesystem::path& path) {
  std::vector<EventRecord> records;
  for (const auto& j : ReadJsonl(path)) records.push_back(EventRecordFromJson(j));
  return records;
}

void WriteRecords(const std::filesystem::path& path,
                  std::span<const EventRecord> records) {
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(ToJson(r));
  WriteJsonl(path, rows);
}

ColumnMap ColumnMap::FromJson(const Json& j) {
  ColumnMap m;
  try {
    m.id_column = j.at("id").get<std::string>();
    m.text_column = j.at("text").get<std::string>();
    m.emotion_column = j.at("emotion").get<std::string>();
    const Json& app = j.at("appraisals");
    for (Appraisal a : kAllAppraisals) {
      m.appraisal_columns[Index(a)] =
          app.at(std::string(AppraisalName(a))).get<std::string>();
    }
    if (j.contains("rating_columns")) {
      m.rating_columns = j["rating_columns"].get<std::vector<std::string>>();
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed column map: ") + e.what());
  }
  return m;
}

ColumnMap ColumnMap::Load(const std::filesystem::path& path) {
  try {
    return FromJson(Json::parse(ReadFile(path)));
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Json ColumnMap::ToJson() const {
  Json app = Json::object();
  for (Appraisal a : kAllAppraisals) {
    app[std::string(AppraisalName(a))] = appraisal_columns[Index(a)];
  }
  Json j;
  j["id"] = id_column;
  j["text"] = text_column;
  j["emotion"] = emotion_column;
  j["appraisals"] = std::move(app);
  j["rating_columns"] = rating_columns;
  return j;
}

bool Discretize(int score) {
  if (score < 1 || score > 5) {
    throw DataError("appraisal rating " + std::to_string(score) +
                    " outside [1, 5]");
  }
  return score >= 4;
}

FilterResult FilterCorpus(const Table& raw, const ColumnMap& columns) {
  FilterResult result;
  const int id_col = raw.ColumnIndex(columns.id_column);
  const int text_col = raw.ColumnIndex(columns.text_column);
  const int emotion_col = raw.ColumnIndex(columns.emotion_column);
  if (text_col < 0 || emotion_col < 0) {
    throw DataError("export lacks the text or emotion column named in the "
                    "column map");
  }
  std::array<int, kNumAppraisals> app_cols{};
  for (Appraisal a : kAllAppraisals) {
    app_cols[Index(a)] = raw.ColumnIndex(columns.appraisal_columns[Index(a)]);
  }
  std::vector<std::string> absent_ratings;
  for (const auto& name : columns.rating_columns) {
    if (raw.ColumnIndex(name) < 0) absent_ratings.push_back(name);
  }

  for (std::size_t row_no = 0; row_no < raw.rows.size(); ++row_no) {
    const auto& row = raw.rows[row_no];
    const auto cell = [&](int col) -> std::string_view {
      if (col < 0 || static_cast<std::size_t>(col) >= row.size()) return {};
      return row[static_cast<std::size_t>(col)];
    };
    const std::string id = id_col >= 0 && !Trim(cell(id_col)).empty()
                               ? std::string(Trim(cell(id_col)))
                               : "row" + std::to_string(row_no + 1);

    const auto emotion = ParseEmotion(Trim(cell(emotion_col)));
    if (!emotion || ToLower(Trim(cell(emotion_col))) == "guild") {
      ++result.dropped_emotion;
      continue;
    }

    EventRecord record;
    record.id = id;
    record.emotion = *emotion;
    record.text = NormalizeWhitespace(cell(text_col));
    if (record.text.empty()) {
      Log(result.diagnostics, id + ": empty text, row rejected");
      ++result.dropped_malformed;
      continue;
    }

    bool malformed = false;
    for (Appraisal a : kAllAppraisals) {
      const int col = app_cols[Index(a)];
      const std::string& col_name = columns.appraisal_columns[Index(a)];
      if (col < 0 || static_cast<std::size_t>(col) >= row.size()) {
        Log(result.diagnostics,
            id + ": missing appraisal column '" + col_name + "', row rejected");
        malformed = true;
        break;
      }
      const std::string_view value = row[static_cast<std::size_t>(col)];
      if (IsMissingCell(value)) {
        Log(result.diagnostics, id + ": no rating for '" + col_name +
                                    "', treated as false");
        continue;
      }
      const auto rating = ParseRating(value);
      if (!rating || *rating < 1 || *rating > 5) {
        Log(result.diagnostics, id + ": malformed rating '" +
                                    std::string(value) + "' for '" + col_name +
                                    "', row rejected");
        malformed = true;
        break;
      }
      record.appraisal_scores[Index(a)] = *rating;
      record.appraisals[Index(a)] = Discretize(*rating);
    }
    if (malformed) {
      ++result.dropped_malformed;
      continue;
    }
    bool any = false;
    for (bool b : record.appraisals) any = any || b;
    if (!any) {
      ++result.dropped_no_appraisal;
      continue;
    }
    result.records.push_back(std::move(record));
  }
  if (!absent_ratings.empty()) {
    Log(result.diagnostics,
        "export lacks " + std::to_string(absent_ratings.size()) +
            " non-retained rating columns (first: " + absent_ratings.front() +
            ")");
  }
  return result;
}

CorpusSplit SplitCorpus(std::span<const EventRecord> records, std::uint64_t seed,
                        SplitOptions options) {
  if (records.size() < 20) {
    throw DataError("need at least 20 records to split, got " +
                    std::to_string(records.size()));
  }
  CorpusSplit split;
  split.seed = seed;
  auto partition = [&](std::vector<EventRecord> group, std::uint64_t group_seed) {
    Rng rng(group_seed);
    rng.Shuffle(std::span<EventRecord>(group));
    const std::size_t n = group.size();
    const std::size_t n_cls_train = n * 15 / 100;
    const std::size_t n_cls_eval = n * 5 / 100;
    const std::size_t n_gen = n - n_cls_train - n_cls_eval;
    auto it = group.begin();
    split.generator_train.insert(split.generator_train.end(),
                                 std::make_move_iterator(it),
                                 std::make_move_iterator(it + n_gen));
    it += static_cast<std::ptrdiff_t>(n_gen);
    split.classifier_train.insert(split.classifier_train.end(),
                                  std::make_move_iterator(it),
                                  std::make_move_iterator(it + n_cls_train));
    it += static_cast<std::ptrdiff_t>(n_cls_train);
    split.classifier_eval.insert(split.classifier_eval.end(),
                                 std::make_move_iterator(it),
                                 std::make_move_iterator(group.end()));
  };
  if (!options.stratified) {
    partition({records.begin(), records.end()}, seed);
    return split;
  }
  for (Emotion e : kAllEmotions) {
    std::vector<EventRecord> group;
    for (const auto& r : records) {
      if (r.emotion == e) group.push_back(r);
    }
    if (!group.empty()) partition(std::move(group), DeriveSeed(seed, EmotionName(e)));
  }
  return split;
}

std::size_t CorpusStatistics::AppraisalTotal(Appraisal a) const {
  std::size_t total = 0;
  for (const auto& row : cooccurrence) total += row[Index(a)];
  return total;
}

Json CorpusStatistics::ToJson() const {
  Json rows = Json::object();
  for (Emotion e : kAllEmotions) {
    Json row;
    row["documents"] = documents[Index(e)];
    for (Appraisal a : kAllAppraisals) {
      row[std::string(AppraisalName(a))] = cooccurrence[Index(e)][Index(a)];
    }
    rows[std::string(EmotionName(e))] = std::move(row);
  }
  Json totals;
  totals["documents"] = total;
  for (Appraisal a : kAllAppraisals) {
    totals[std::string(AppraisalName(a))] = AppraisalTotal(a);
  }
  Json j;
  j["per_emotion"] = std::move(rows);
  j["total"] = std::move(totals);
  return j;
}

CorpusStatistics ComputeStatistics(std::span<const EventRecord> records) {
  CorpusStatistics stats;
  for (const auto& r : records) {
    ++stats.documents[Index(r.emotion)];
    for (Appraisal a : kAllAppraisals) {
      if (r.appraisals[Index(a)]) ++stats.cooccurrence[Index(r.emotion)][Index(a)];
    }
  }
  stats.total = records.size();
  return stats;
}

Json TotalDiscrepancyReport(std::size_t filtered_total) {
  const auto delta = [&](std::size_t reference) {
    return static_cast<long long>(filtered_total) -
           static_cast<long long>(reference);
  };
  Json j;
  j["filtered_total"] = filtered_total;
  j["reference_in_text"] = kReportedTotalInText;
  j["reference_in_table"] = kReportedTotalInTable;
  j["delta_in_text"] = delta(kReportedTotalInText);
  j["delta_in_table"] = delta(kReportedTotalInTable);
  j["references_disagree_by"] =
      static_cast<long long>(kReportedTotalInText - kReportedTotalInTable);
  return j;
}

}  // namespace cnlg
