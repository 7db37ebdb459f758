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

#include "cnlg/humaneval.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "cnlg/error.h"
#include "cnlg/random.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

#include "cnlg/survey_catalog.inc"

StatementSection SectionFromId(std::string_view id) {
  if (id == "emotion") return StatementSection::kEmotion;
  if (id == "appraisal") return StatementSection::kAppraisal;
  if (id == "quality") return StatementSection::kQuality;
  throw DataError("unknown survey section '" + std::string(id) + "'");
}

}  // namespace

StatementCatalog StatementCatalog::FromJson(const Json& j) {
  StatementCatalog c;
  try {
    c.scale = j.at("scale").get<std::vector<std::string>>();
    if (c.scale.size() != kLikertMax) throw DataError("survey scale must have 5 levels");
    for (const auto& sec : j.at("sections")) {
      const StatementSection section = SectionFromId(sec.at("id").get<std::string>());
      c.headers[section] = sec.at("header").get<std::string>();
      for (const auto& st : sec.at("statements")) {
        c.statements.push_back(
            {st.at("id").get<std::string>(), st.at("text").get<std::string>(), section, {}});
      }
    }
    for (const auto& st : j.at("attention_checks")) {
      c.attention_checks.push_back({st.at("id").get<std::string>(),
                                    st.at("text").get<std::string>(),
                                    StatementSection::kAttentionCheck,
                                    st.at("expected").get<int>()});
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed statement catalog: ") + e.what());
  }
  if (c.statements.size() != 3 * 7 || c.attention_checks.size() != 2) {
    throw DataError("statement catalog needs 21 statements and 2 attention checks");
  }
  for (Emotion e : kAllEmotions) {
    if (!c.Find(EmotionId(e))) throw DataError("catalog misses " + EmotionId(e));
  }
  for (Appraisal a : kAllAppraisals) {
    if (!c.Find(AppraisalId(a))) throw DataError("catalog misses " + AppraisalId(a));
  }
  return c;
}

const StatementCatalog& StatementCatalog::Default() {
  static const StatementCatalog catalog = FromJson(Json::parse(kSurveyCatalogJson));
  return catalog;
}

const Statement* StatementCatalog::Find(std::string_view id) const {
  for (const auto& s : statements) {
    if (s.id == id) return &s;
  }
  for (const auto& s : attention_checks) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::string StatementCatalog::EmotionId(Emotion e) {
  return "emotion." + std::string(EmotionName(e));
}

std::string StatementCatalog::AppraisalId(Appraisal a) {
  return "appraisal." + std::string(AppraisalName(a));
}

std::vector<std::string> StatementCatalog::QualityIds() {
  return {"quality.fluent",    "quality.grammar_issues", "quality.native",
          "quality.coherent",  "quality.realistic",      "quality.machine",
          "quality.human"};
}

std::string_view OriginName(Origin o) {
  switch (o) {
    case Origin::kHuman:
      return "human";
    case Origin::kEEp:
      return "E:EP";
    case Origin::kEaEp:
      return "EA:EP";
    case Origin::kEaEfa:
      return "EA:EfA";
  }
  return "?";
}

std::optional<Origin> ParseOrigin(std::string_view name) {
  for (Origin o : kAllOrigins) {
    if (ToLower(name) == ToLower(OriginName(o))) return o;
  }
  return std::nullopt;
}

Json SurveyItem::ToJson() const {
  Json j;
  j["id"] = id;
  j["text"] = text;
  j["origin"] = OriginName(origin);
  j["gold_emotion"] = gold_emotion ? Json(EmotionName(*gold_emotion)) : Json(nullptr);
  j["gold_appraisals"] = gold_appraisals ? Json(BitString(*gold_appraisals)) : Json(nullptr);
  j["source"] = source;
  j["order_seed"] = order_seed;
  j["statement_order"] = statement_order;
  j["check_positions"] = check_positions;
  return j;
}

SurveyItem SurveyItem::FromJson(const Json& j) {
  try {
    SurveyItem item;
    item.id = j.at("id").get<std::string>();
    item.text = j.at("text").get<std::string>();
    const auto origin = ParseOrigin(j.at("origin").get<std::string>());
    if (!origin) throw DataError("unknown origin in survey item " + item.id);
    item.origin = *origin;
    if (!j.at("gold_emotion").is_null()) {
      item.gold_emotion = ParseEmotion(j.at("gold_emotion").get<std::string>());
      if (!item.gold_emotion) throw DataError("unknown emotion in survey item " + item.id);
    }
    if (!j.at("gold_appraisals").is_null()) {
      item.gold_appraisals = ParseBitString(j.at("gold_appraisals").get<std::string>());
      if (!item.gold_appraisals) throw DataError("bad appraisal bits in survey item " + item.id);
    }
    item.source = j.value("source", std::string());
    item.order_seed = j.value("order_seed", std::uint64_t{0});
    item.statement_order = j.at("statement_order").get<std::vector<std::string>>();
    item.check_positions = j.at("check_positions").get<std::array<std::size_t, 2>>();
    return item;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed survey item: ") + e.what());
  }
}

std::map<std::string, std::vector<Validation>> ReadValidations(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<Validation>> out;
  std::size_t line = 0;
  for (const auto& j : ReadJsonl(path)) {
    ++line;
    try {
      Validation v;
      const auto e = ParseEmotion(j.at("emotion").get<std::string>());
      if (!e) throw DataError(fmt::format("{}:{}: unknown emotion", path.string(), line));
      v.emotion = *e;
      for (const auto& [name, value] : j.at("appraisals").items()) {
        const auto a = ParseAppraisal(name);
        if (!a) {
          throw DataError(fmt::format("{}:{}: unknown appraisal '{}'", path.string(), line, name));
        }
        v.appraisals[Index(*a)] =
            value.is_boolean() ? value.get<bool>() : Discretize(value.get<int>());
      }
      out[j.at("id").get<std::string>()].push_back(v);
    } catch (const Json::exception& ex) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), line, ex.what()));
    }
  }
  return out;
}

std::optional<double> Agreement(const GoldCandidate& candidate) {
  if (candidate.validations.empty()) return std::nullopt;
  std::vector<Validation> all;
  all.push_back({candidate.record.emotion, candidate.record.appraisals});
  all.insert(all.end(), candidate.validations.begin(), candidate.validations.end());
  double total = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t k = i + 1; k < all.size(); ++k) {
      int same = all[i].emotion == all[k].emotion ? 1 : 0;
      for (std::size_t a = 0; a < kNumAppraisals; ++a) {
        same += all[i].appraisals[a] == all[k].appraisals[a] ? 1 : 0;
      }
      total += same / static_cast<double>(1 + kNumAppraisals);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

namespace {

struct PoolEntry {
  std::string text;
  Condition condition;
  std::string source;
};

template <typename T>
std::vector<T> SampleWithoutReplacement(std::vector<T> pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.UniformInt(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size() - 1)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

void AssignStatementOrder(SurveyItem& item, const StatementCatalog& catalog) {
  Rng rng(item.order_seed);
  const std::size_t total = catalog.statements.size() + catalog.attention_checks.size();
  std::vector<std::size_t> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.UniformInt(static_cast<std::int64_t>(i), static_cast<std::int64_t>(total - 1)));
    std::swap(slots[i], slots[j]);
  }
  item.check_positions = {slots[0], slots[1]};
  item.statement_order.assign(total, "");
  item.statement_order[slots[0]] = catalog.attention_checks[0].id;
  item.statement_order[slots[1]] = catalog.attention_checks[1].id;
  std::size_t next = 0;
  for (auto& slot : item.statement_order) {
    if (slot.empty()) slot = catalog.statements[next++].id;
  }
}

}  // namespace

std::vector<SurveyItem> SampleStudy(const std::map<Origin, std::vector<GenerationResult>>& cells,
                                    std::span<const GoldCandidate> gold, std::uint64_t seed,
                                    const StudyOptions& options) {
  std::vector<std::string> shortfalls;
  std::vector<SurveyItem> items;
  for (Origin origin : {Origin::kEEp, Origin::kEaEp, Origin::kEaEfa}) {
    std::vector<PoolEntry> pool;
    auto it = cells.find(origin);
    if (it != cells.end()) {
      for (const auto& r : it->second) {
        for (std::size_t k = 0; k < r.candidates.size(); ++k) {
          if (Trim(r.candidates[k].text).empty()) continue;
          pool.push_back({r.candidates[k].text, r.condition,
                          fmt::format("{}#{}/{}", OriginName(origin), r.index, k)});
        }
      }
    }
    if (pool.size() < options.per_cell) {
      shortfalls.push_back(fmt::format("{} has {} candidates, needs {}", OriginName(origin),
                                       pool.size(), options.per_cell));
      continue;
    }
    Rng rng(DeriveSeed(seed, "study:" + std::string(OriginName(origin))));
    for (auto& e : SampleWithoutReplacement(std::move(pool), options.per_cell, rng)) {
      SurveyItem item;
      item.text = std::move(e.text);
      item.origin = origin;
      item.gold_emotion = e.condition.emotion;
      item.gold_appraisals = e.condition.appraisals;
      item.source = std::move(e.source);
      items.push_back(std::move(item));
    }
  }

  std::vector<std::pair<double, const GoldCandidate*>> ranked;
  for (const auto& g : gold) {
    if (auto a = Agreement(g)) ranked.emplace_back(*a, &g);
  }
  if (ranked.size() < options.gold) {
    shortfalls.push_back(fmt::format("gold pool has {} validated texts, needs {}",
                                     ranked.size(), options.gold));
  }
  if (!shortfalls.empty()) {
    throw DataError("insufficient study pool: " + Join(shortfalls, "; "));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->record.id < b.second->record.id;
  });
  for (std::size_t i = 0; i < options.gold; ++i) {
    const EventRecord& r = ranked[i].second->record;
    SurveyItem item;
    item.text = r.text;
    item.origin = Origin::kHuman;
    item.gold_emotion = r.emotion;
    item.gold_appraisals = r.appraisals;
    item.source = r.id;
    items.push_back(std::move(item));
  }

  Rng order(DeriveSeed(seed, "study:order"));
  order.Shuffle(std::span<SurveyItem>(items));
  const StatementCatalog& catalog = StatementCatalog::Default();
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].id = fmt::format("item-{:03d}", i + 1);
    items[i].order_seed = DeriveSeed(seed, items[i].id);
    AssignStatementOrder(items[i], catalog);
  }
  return items;
}

void ExportSurvey(std::span<const SurveyItem> items, const std::filesystem::path& dir,
                  std::size_t batch_size, const StatementCatalog& catalog) {
  if (batch_size == 0) throw UsageError("batch size must be positive");
  std::filesystem::create_directories(dir);
  Json study;
  study["statements"] = Json::array();
  for (const auto& s : catalog.statements) {
    study["statements"].push_back({{"id", s.id}, {"text", s.text}});
  }
  for (const auto& s : catalog.attention_checks) {
    study["statements"].push_back({{"id", s.id}, {"text", s.text}, {"expected", *s.expected}});
  }
  study["scale"] = catalog.scale;
  study["items"] = Json::array();
  for (const auto& item : items) study["items"].push_back(item.ToJson());
  WriteFileAtomic(dir / "study.json", study.dump(2));

  std::vector<std::string> ids;
  for (const auto& s : catalog.statements) ids.push_back(s.id);
  for (const auto& s : catalog.attention_checks) ids.push_back(s.id);
  for (std::size_t start = 0, batch = 1; start < items.size(); start += batch_size, ++batch) {
    std::string csv = "item_id,text,order_seed,statement_order";
    for (const auto& id : ids) csv += "," + id;
    csv += "\n";
    for (std::size_t i = start; i < std::min(items.size(), start + batch_size); ++i) {
      const auto& item = items[i];
      csv += CsvEscape(item.id) + "," + CsvEscape(item.text) + "," +
             std::to_string(item.order_seed) + "," +
             CsvEscape(Join(item.statement_order, "|"));
      csv += std::string(ids.size(), ',');
      csv += "\n";
    }
    WriteFileAtomic(dir / fmt::format("survey_batch_{:03d}.csv", batch), csv);
  }
}

std::vector<SurveyItem> ReadStudy(const std::filesystem::path& dir) {
  Json study;
  try {
    study = Json::parse(ReadFile(dir / "study.json"));
  } catch (const Json::parse_error& e) {
    throw DataError("corrupt study.json: " + std::string(e.what()));
  }
  std::vector<SurveyItem> items;
  for (const auto& j : study.at("items")) items.push_back(SurveyItem::FromJson(j));
  return items;
}

std::vector<Response> ParseResponses(const Table& table, const StatementCatalog& catalog) {
  const int item_col = table.ColumnIndex("item_id");
  const int ann_col = table.ColumnIndex("annotator");
  if (item_col < 0 || ann_col < 0) {
    throw DataError("responses need item_id and annotator columns");
  }
  std::vector<std::pair<std::string, int>> cols;
  std::vector<const Statement*> all;
  for (const auto& s : catalog.statements) all.push_back(&s);
  for (const auto& s : catalog.attention_checks) all.push_back(&s);
  for (const Statement* s : all) {
    const int c = table.ColumnIndex(s->id);
    if (c < 0) throw DataError("responses miss statement column " + s->id);
    cols.emplace_back(s->id, c);
  }
  std::vector<Response> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Response resp;
    resp.item_id = row.at(static_cast<std::size_t>(item_col));
    resp.annotator = row.at(static_cast<std::size_t>(ann_col));
    for (const auto& [id, c] : cols) {
      const std::string cell(Trim(row.at(static_cast<std::size_t>(c))));
      int value = 0;
      const auto label = std::find_if(catalog.scale.begin(), catalog.scale.end(),
                                      [&](const auto& s) { return ToLower(s) == ToLower(cell); });
      if (label != catalog.scale.end()) {
        value = static_cast<int>(label - catalog.scale.begin()) + 1;
      } else {
        try {
          std::size_t used = 0;
          value = std::stoi(cell, &used);
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw DataError(fmt::format("response row {}: '{}' is not a rating for {}", r + 2,
                                      cell, id));
        }
      }
      resp.ratings[id] = value;
    }
    out.push_back(std::move(resp));
  }
  return out;
}

std::vector<Response> ReadResponses(const std::filesystem::path& path,
                                    const StatementCatalog& catalog) {
  return ParseResponses(ReadTable(path), catalog);
}

Json AggregateResult::ToJson() const {
  Json j;
  j["items"] = Json::array();
  for (const auto& it : items) {
    Json e = Json::object();
    Json means = Json::object();
    for (Emotion em : kAllEmotions) {
      e[std::string(EmotionName(em))] = it.emotion_labels[Index(em)];
      means[std::string(EmotionName(em))] = it.emotion_mean_rating[Index(em)];
    }
    Json a = Json::object();
    for (Appraisal ap : kAllAppraisals) a[std::string(AppraisalName(ap))] = it.appraisals[Index(ap)];
    Json q = Json::object();
    for (const auto& [k, v] : it.quality) q[k] = v;
    j["items"].push_back({{"item_id", it.item_id},
                          {"emotion_labels", e},
                          {"emotion_mean_rating", means},
                          {"emotion", it.emotion ? Json(EmotionName(*it.emotion)) : Json(nullptr)},
                          {"appraisals", a},
                          {"quality", q}});
  }
  j["voided_annotators"] = voided_annotators;
  j["excluded_items"] = Json::object();
  for (const auto& [k, v] : excluded_items) j["excluded_items"][k] = v;
  return j;
}

AggregateResult Aggregate(std::span<const Response> responses, const StatementCatalog& catalog) {
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> voided;
  for (const auto& r : responses) {
    if (!seen.emplace(r.item_id, r.annotator).second) {
      throw DataError("duplicate response by " + r.annotator + " on " + r.item_id);
    }
    auto check = [&](const Statement& s) {
      auto it = r.ratings.find(s.id);
      if (it == r.ratings.end()) {
        throw DataError(fmt::format("response by {} on {} misses {}", r.annotator, r.item_id,
                                    s.id));
      }
      if (it->second < kLikertMin || it->second > kLikertMax) {
        throw DataError(fmt::format("response by {} on {}: rating {} for {} outside 1..5",
                                    r.annotator, r.item_id, it->second, s.id));
      }
      return it->second;
    };
    for (const auto& s : catalog.statements) check(s);
    for (const auto& s : catalog.attention_checks) {
      if (check(s) != *s.expected) voided.insert(r.annotator);
    }
  }

  std::map<std::string, std::vector<const Response*>> by_item;
  for (const auto& r : responses) {
    auto& list = by_item[r.item_id];
    if (!voided.count(r.annotator)) list.push_back(&r);
  }

  AggregateResult result;
  result.voided_annotators.assign(voided.begin(), voided.end());
  for (const auto& [item_id, list] : by_item) {
    if (list.size() != kAnnotatorsPerItem) {
      result.excluded_items[item_id] = list.size();
      continue;
    }
    ItemLabels labels;
    labels.item_id = item_id;
    auto vote = [&](const std::string& id, double* mean) {
      int high = 0;
      double sum = 0;
      for (const Response* r : list) {
        const int v = r->ratings.at(id);
        high += Discretize(v) ? 1 : 0;
        sum += v;
      }
      if (mean) *mean = sum / static_cast<double>(list.size());
      return 2 * high > static_cast<int>(list.size());
    };
    for (Emotion e : kAllEmotions) {
      labels.emotion_labels[Index(e)] =
          vote(StatementCatalog::EmotionId(e), &labels.emotion_mean_rating[Index(e)]);
    }
    for (Appraisal a : kAllAppraisals) {
      labels.appraisals[Index(a)] = vote(StatementCatalog::AppraisalId(a), nullptr);
    }
    for (const auto& s : catalog.statements) {
      if (s.section != StatementSection::kQuality) continue;
      double sum = 0;
      for (const Response* r : list) sum += r->ratings.at(s.id);
      labels.quality[s.id] = sum / static_cast<double>(list.size());
    }
    double best = -1;
    bool tie = false;
    for (Emotion e : kAllEmotions) {
      if (!labels.emotion_labels[Index(e)]) continue;
      const double m = labels.emotion_mean_rating[Index(e)];
      if (m > best) {
        best = m;
        labels.emotion = e;
        tie = false;
      } else if (m == best) {
        tie = true;
      }
    }
    if (tie) labels.emotion.reset();
    result.items.push_back(std::move(labels));
  }
  if (!result.voided_annotators.empty()) {
    spdlog::info("voided {} annotators failing attention checks",
                 result.voided_annotators.size());
  }
  return result;
}

Json HumanEvalReport::ToJson() const {
  Json j;
  j["emotion"] = Json::array();
  for (const auto& r : emotion) j["emotion"].push_back(r.ToJson());
  j["quality"] = Json::object();
  for (const auto& [o, q] : quality) {
    Json row = Json::object();
    for (const auto& [k, v] : q) row[k] = v;
    j["quality"][std::string(OriginName(o))] = row;
  }
  j["machine_human_correlation"] =
      machine_human_correlation ? Json(*machine_human_correlation) : Json(nullptr);
  j["warnings"] = warnings;
  return j;
}

HumanEvalReport HumanF1(std::span<const ItemLabels> labels, std::span<const SurveyItem> items) {
  std::map<std::string, const SurveyItem*> by_id;
  for (const auto& it : items) by_id[it.id] = &it;
  HumanEvalReport report;
  std::vector<double> machine;
  std::vector<double> human;
  for (const auto& l : labels) {
    if (!by_id.count(l.item_id)) report.warnings.push_back("labels for unknown item " + l.item_id);
  }
  for (Origin origin : kAllOrigins) {
    std::vector<int> gold;
    std::vector<int> pred;
    std::array<std::vector<bool>, kNumAppraisals> gold_app;
    std::array<std::vector<bool>, kNumAppraisals> pred_app;
    std::map<std::string, double> quality_sum;
    std::size_t n = 0;
    for (const auto& l : labels) {
      auto it = by_id.find(l.item_id);
      if (it == by_id.end() || it->second->origin != origin) continue;
      const SurveyItem& item = *it->second;
      ++n;
      if (item.gold_emotion) {
        gold.push_back(static_cast<int>(Index(*item.gold_emotion)));
        pred.push_back(l.emotion ? static_cast<int>(Index(*l.emotion)) : kNoPrediction);
      }
      if (item.gold_appraisals) {
        for (std::size_t a = 0; a < kNumAppraisals; ++a) {
          gold_app[a].push_back((*item.gold_appraisals)[a]);
          pred_app[a].push_back(l.appraisals[a]);
        }
      }
      for (const auto& [k, v] : l.quality) quality_sum[k] += v;
      if (l.quality.count("quality.machine") && l.quality.count("quality.human")) {
        machine.push_back(l.quality.at("quality.machine"));
        human.push_back(l.quality.at("quality.human"));
      }
    }
    if (n == 0) continue;
    EvaluationReport r;
    if (origin == Origin::kHuman) {
      r.cell = {"human", "Hum.", "enVent"};
    } else {
      const auto parts = Split(OriginName(origin), ':');
      r.cell = {"human", parts[0], parts[1]};
    }
    r.n_texts = n;
    if (!gold.empty()) {
      const F1Report f1 = MulticlassF1(gold, pred, kNumEmotions);
      for (Emotion e : kAllEmotions) r.per_emotion_f1[e] = f1.per_class[Index(e)].f1;
      r.macro_f1 = f1.macro_f1;
    }
    if (!gold_app[0].empty()) {
      std::vector<std::optional<double>> f1s;
      for (Appraisal a : kAllAppraisals) {
        const auto s = BinaryScores(gold_app[Index(a)], pred_app[Index(a)]);
        r.per_appraisal_f1[a] = s.f1;
        f1s.push_back(s.f1);
      }
      r.appraisal_macro_f1 = MacroAverage(f1s);
    }
    report.emotion.push_back(std::move(r));
    for (auto& [k, v] : quality_sum) v /= static_cast<double>(n);
    report.quality[origin] = std::move(quality_sum);
  }
  try {
    if (machine.size() >= 2) {
      report.machine_human_correlation = PearsonCorrelation(machine, human);
    } else {
      report.warnings.push_back("too few items for the authorship correlation");
    }
  } catch (const DataError& e) {
    report.warnings.push_back(e.what());
  }
  return report;
}

std::string RenderQualityTable(const HumanEvalReport& report) {
  static const std::array<std::string_view, 7> kHeaders = {
      "Fluent", "Grammar", "Native", "Coherent", "Realistic", "Machine", "Human"};
  const auto ids = StatementCatalog::QualityIds();
  std::string out = fmt::format("{:<10}", "Origin");
  for (auto h : kHeaders) out += fmt::format("{:>10}", h);
  out += "\n";
  for (const auto& [origin, q] : report.quality) {
    out += fmt::format("{:<10}", OriginName(origin));
    for (const auto& id : ids) {
      auto it = q.find(id);
      out += it == q.end() ? fmt::format("{:>10}", "-") : fmt::format("{:>10.2f}", it->second);
    }
    out += "\n";
  }
  return out;
}

}  // namespace cnlg
