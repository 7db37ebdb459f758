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

#include "cnlg/evaluators.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "cnlg/error.h"
#include "cnlg/random.h"
#include "cnlg/text.h"

namespace cnlg {
namespace {

std::string StripPunct(std::string_view w) {
  std::size_t b = 0;
  std::size_t e = w.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
  return ToLower(w.substr(b, e - b));
}

Json OptionalJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> OptionalFromJson(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string Cell(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}", *v) : std::string("-");
}

Json ScoresJson(const ClassScores& s) {
  Json j;
  j["support"] = s.support;
  j["precision"] = OptionalJson(s.precision);
  j["recall"] = OptionalJson(s.recall);
  j["f1"] = OptionalJson(s.f1);
  return j;
}

}  // namespace

Json ClassifierParams::ToJson() const {
  Json j;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["l2"] = l2;
  j["seed"] = seed;
  return j;
}

ClassifierParams ClassifierParams::FromJson(const Json& j) {
  ClassifierParams p;
  p.epochs = j.value("epochs", p.epochs);
  p.batch_size = j.value("batch_size", p.batch_size);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.l2 = j.value("l2", p.l2);
  p.seed = j.value("seed", p.seed);
  return p;
}

BowLogisticRegression::BowLogisticRegression(std::size_t num_classes)
    : num_classes_(num_classes), weights_(num_classes, std::vector<double>(1, 0.0)) {
  if (num_classes < 2) throw UsageError("classifier needs at least 2 classes");
}

std::vector<std::string> BowLogisticRegression::Features(std::string_view text) {
  std::vector<std::string> words;
  for (const auto& w : SplitWords(text)) {
    std::string s = StripPunct(w);
    if (!s.empty()) words.push_back(std::move(s));
  }
  std::set<std::string> feats;
  for (std::size_t i = 0; i < words.size(); ++i) {
    feats.insert("u:" + words[i]);
    if (i + 1 < words.size()) feats.insert("b:" + words[i] + "_" + words[i + 1]);
  }
  return {feats.begin(), feats.end()};
}

std::vector<int> BowLogisticRegression::FeatureIds(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& f : Features(text)) {
    auto it = features_.find(f);
    if (it != features_.end()) ids.push_back(it->second);
  }
  return ids;
}

void BowLogisticRegression::Fit(std::span<const std::string> texts,
                                std::span<const int> labels,
                                const ClassifierParams& params) {
  if (texts.size() != labels.size() || texts.empty()) {
    throw DataError("classifier training needs equally many texts and labels");
  }
  features_.clear();
  for (const auto& t : texts) {
    for (const auto& f : Features(t)) {
      features_.emplace(f, static_cast<int>(features_.size()));
    }
  }
  const std::size_t bias = features_.size();
  weights_.assign(num_classes_, std::vector<double>(bias + 1, 0.0));

  std::vector<std::vector<int>> x;
  x.reserve(texts.size());
  for (const auto& t : texts) {
    auto ids = FeatureIds(t);
    ids.push_back(static_cast<int>(bias));
    x.push_back(std::move(ids));
  }

  Rng rng(params.seed);
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, params.batch_size));
  std::vector<double> probs(num_classes_);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double step = params.learning_rate / static_cast<double>(end - start);
      // Gradients of the minibatch, applied after the forward passes.
      std::vector<std::tuple<std::size_t, int, double>> updates;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        double max = -1e300;
        for (std::size_t c = 0; c < num_classes_; ++c) {
          double s = 0;
          for (int f : x[i]) s += weights_[c][static_cast<std::size_t>(f)];
          probs[c] = s;
          max = std::max(max, s);
        }
        double z = 0;
        for (auto& p : probs) {
          p = std::exp(p - max);
          z += p;
        }
        for (std::size_t c = 0; c < num_classes_; ++c) {
          const double g = probs[c] / z - (labels[i] == static_cast<int>(c) ? 1.0 : 0.0);
          for (int f : x[i]) updates.emplace_back(c, f, g);
        }
      }
      for (const auto& [c, f, g] : updates) {
        double& w = weights_[c][static_cast<std::size_t>(f)];
        w -= step * g + params.learning_rate * params.l2 * w;
      }
    }
  }
}

std::vector<double> BowLogisticRegression::PredictProba(std::string_view text) const {
  auto ids = FeatureIds(text);
  const std::size_t bias = weights_[0].size() - 1;
  std::vector<double> out(num_classes_);
  double max = -1e300;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    double s = weights_[c][bias];
    for (int f : ids) s += weights_[c][static_cast<std::size_t>(f)];
    out[c] = s;
    max = std::max(max, s);
  }
  double z = 0;
  for (auto& p : out) {
    p = std::exp(p - max);
    z += p;
  }
  for (auto& p : out) p /= z;
  return out;
}

Json BowLogisticRegression::ToJson() const {
  std::vector<std::string> names(features_.size());
  for (const auto& [f, id] : features_) names[static_cast<std::size_t>(id)] = f;
  Json j;
  j["type"] = Identity();
  j["num_classes"] = num_classes_;
  j["features"] = names;
  j["weights"] = weights_;
  return j;
}

std::unique_ptr<BowLogisticRegression> BowLogisticRegression::FromJson(const Json& j) {
  try {
    auto model = std::make_unique<BowLogisticRegression>(j.at("num_classes").get<std::size_t>());
    const auto names = j.at("features").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      model->features_.emplace(names[i], static_cast<int>(i));
    }
    model->weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
    if (model->weights_.size() != model->num_classes_) {
      throw DataError("classifier weight rows do not match class count");
    }
    for (const auto& row : model->weights_) {
      if (row.size() != names.size() + 1) throw DataError("classifier weight width mismatch");
    }
    return model;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed classifier: ") + e.what());
  }
}

void Judges::Save(const std::filesystem::path& dir) const {
  Json apps = Json::object();
  for (Appraisal a : kAllAppraisals) {
    apps[std::string(AppraisalName(a))] = appraisals[Index(a)]->ToJson();
  }
  Json j;
  j["threshold"] = threshold;
  j["emotion"] = emotion->ToJson();
  j["appraisals"] = std::move(apps);
  WriteFileAtomic(dir / "judges.json", j.dump());
}

Judges Judges::Load(const std::filesystem::path& dir) {
  Json j;
  try {
    j = Json::parse(ReadFile(dir / "judges.json"));
  } catch (const Json::parse_error& e) {
    throw DataError("corrupt judges.json: " + std::string(e.what()));
  }
  Judges judges;
  judges.threshold = j.value("threshold", 0.5);
  judges.emotion = BowLogisticRegression::FromJson(j.at("emotion"));
  for (Appraisal a : kAllAppraisals) {
    judges.appraisals[Index(a)] =
        BowLogisticRegression::FromJson(j.at("appraisals").at(std::string(AppraisalName(a))));
  }
  return judges;
}

Json JudgeMetrics::ToJson() const {
  Json emo = Json::object();
  for (Emotion e : kAllEmotions) {
    emo[std::string(EmotionName(e))] = ScoresJson(emotion.per_class[Index(e)]);
  }
  Json app = Json::object();
  for (Appraisal a : kAllAppraisals) {
    app[std::string(AppraisalName(a))] = ScoresJson(appraisals[Index(a)]);
  }
  Json j;
  j["emotion"] = std::move(emo);
  j["emotion_macro_f1"] = OptionalJson(emotion.macro_f1);
  j["appraisals"] = std::move(app);
  j["appraisal_macro_f1"] = OptionalJson(appraisal_macro_f1);
  return j;
}

Judges TrainJudges(const CorpusSplit& split, const ClassifierParams& params,
                   JudgeMetrics* metrics) {
  if (split.classifier_train.empty() || split.classifier_eval.empty()) {
    throw DataError("judge training needs non-empty classifier_train and classifier_eval");
  }
  std::vector<std::string> texts;
  std::vector<int> emotions;
  for (const auto& r : split.classifier_train) {
    texts.push_back(r.text);
    emotions.push_back(static_cast<int>(Index(r.emotion)));
  }
  Judges judges;
  for (Appraisal a : kAllAppraisals) {
    std::vector<int> labels;
    for (const auto& r : split.classifier_train) labels.push_back(r.appraisals[Index(a)] ? 1 : 0);
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || positives == static_cast<long>(labels.size())) {
      throw DataError("appraisal '" + std::string(AppraisalName(a)) +
                      "' has a single class in classifier training data");
    }
    auto model = std::make_unique<BowLogisticRegression>(2);
    ClassifierParams p = params;
    p.seed = DeriveSeed(params.seed, AppraisalName(a));
    model->Fit(texts, labels, p);
    judges.appraisals[Index(a)] = std::move(model);
  }
  auto emotion = std::make_unique<BowLogisticRegression>(kNumEmotions);
  emotion->Fit(texts, emotions, params);
  judges.emotion = std::move(emotion);

  if (metrics) {
    std::vector<std::string> eval_texts;
    std::vector<int> gold;
    for (const auto& r : split.classifier_eval) {
      eval_texts.push_back(r.text);
      gold.push_back(static_cast<int>(Index(r.emotion)));
    }
    const auto judged = JudgeTexts(judges, eval_texts);
    std::vector<int> pred;
    for (const auto& j : judged) pred.push_back(static_cast<int>(Index(j.emotion)));
    metrics->emotion = MulticlassF1(gold, pred, kNumEmotions);
    std::vector<std::optional<double>> f1s;
    for (Appraisal a : kAllAppraisals) {
      std::vector<bool> g;
      std::vector<bool> p;
      for (std::size_t i = 0; i < judged.size(); ++i) {
        g.push_back(split.classifier_eval[i].appraisals[Index(a)]);
        p.push_back(judged[i].appraisals[Index(a)]);
      }
      metrics->appraisals[Index(a)] = BinaryScores(g, p);
      f1s.push_back(metrics->appraisals[Index(a)].f1);
    }
    metrics->appraisal_macro_f1 = MacroAverage(f1s);
  }
  return judges;
}

std::vector<Judgment> JudgeTexts(const Judges& judges,
                                 std::span<const std::string> texts) {
  std::vector<Judgment> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Judgment j;
    if (Trim(t).empty()) {
      out.push_back(j);
      continue;
    }
    j.valid = true;
    const auto probs = judges.emotion->PredictProba(t);
    j.emotion = kAllEmotions[static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin())];
    for (Appraisal a : kAllAppraisals) {
      j.appraisals[Index(a)] =
          judges.appraisals[Index(a)]->PredictProba(t)[1] >= judges.threshold;
    }
    out.push_back(j);
  }
  return out;
}

CellId CellId::Parse(std::string_view spec) {
  const auto parts = Split(spec, ':');
  if (parts.size() != 3 || parts[0].empty() || !ParseConfig(parts[1]) ||
      !ParseTestSetName(parts[2])) {
    throw UsageError("cell must look like ARCH:CONFIG:SET, got '" + std::string(spec) + "'");
  }
  return {parts[0], parts[1], parts[2]};
}

std::string CellId::ToString() const { return architecture + ":" + config + ":" + set; }

Json EvaluationReport::ToJson() const {
  Json emo = Json::object();
  for (const auto& [e, f] : per_emotion_f1) emo[std::string(EmotionName(e))] = OptionalJson(f);
  Json app = Json::object();
  for (const auto& [a, f] : per_appraisal_f1) app[std::string(AppraisalName(a))] = OptionalJson(f);
  Json c;
  c["architecture"] = cell.architecture;
  c["config"] = cell.config;
  c["set"] = cell.set;
  Json j;
  j["cell"] = std::move(c);
  j["per_emotion_f1"] = std::move(emo);
  j["macro_f1"] = OptionalJson(macro_f1);
  j["per_appraisal_f1"] = std::move(app);
  j["appraisal_macro_f1"] = OptionalJson(appraisal_macro_f1);
  j["perplexity"] = OptionalJson(perplexity);
  j["n_texts"] = n_texts;
  j["n_invalid"] = n_invalid;
  j["warnings"] = warnings;
  return j;
}

EvaluationReport EvaluationReport::FromJson(const Json& j) {
  EvaluationReport r;
  try {
    r.cell = {j.at("cell").at("architecture").get<std::string>(),
              j.at("cell").at("config").get<std::string>(),
              j.at("cell").at("set").get<std::string>()};
    for (const auto& [name, v] : j.at("per_emotion_f1").items()) {
      const auto e = ParseEmotion(name);
      if (!e) throw DataError("unknown emotion " + name);
      r.per_emotion_f1[*e] = OptionalFromJson(v);
    }
    r.macro_f1 = OptionalFromJson(j.at("macro_f1"));
    for (const auto& [name, v] : j.at("per_appraisal_f1").items()) {
      const auto a = ParseAppraisal(name);
      if (!a) throw DataError("unknown appraisal " + name);
      r.per_appraisal_f1[*a] = OptionalFromJson(v);
    }
    r.appraisal_macro_f1 = OptionalFromJson(j.at("appraisal_macro_f1"));
    r.perplexity = OptionalFromJson(j.value("perplexity", Json(nullptr)));
    r.n_texts = j.value("n_texts", std::size_t{0});
    r.n_invalid = j.value("n_invalid", std::size_t{0});
    r.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

std::vector<std::string> CellTexts(std::span<const GenerationResult> results,
                                   const ScoreOptions& options) {
  std::vector<std::string> texts;
  for (const auto& r : results) {
    for (std::size_t k = 0; k < r.candidates.size(); ++k) {
      if (options.top1_only && k > 0) break;
      texts.push_back(r.candidates[k].text);
    }
  }
  return texts;
}

EvaluationReport ScoreCell(const CellId& cell,
                           std::span<const GenerationResult> results,
                           std::span<const Judgment> judgments,
                           const ScoreOptions& options) {
  EvaluationReport report;
  report.cell = cell;
  std::vector<int> gold_emotion;
  std::vector<int> pred_emotion;
  std::array<std::vector<bool>, kNumAppraisals> gold_app;
  std::array<std::vector<bool>, kNumAppraisals> pred_app;
  bool any_emotion = false;
  bool any_appraisal = false;
  std::size_t k = 0;
  for (const auto& r : results) {
    for (std::size_t c = 0; c < r.candidates.size(); ++c) {
      if (options.top1_only && c > 0) break;
      if (k >= judgments.size()) throw UsageError("fewer judgments than texts");
      const Judgment& j = judgments[k++];
      ++report.n_texts;
      if (!j.valid) {
        ++report.n_invalid;
        continue;
      }
      if (r.condition.emotion) {
        any_emotion = true;
        gold_emotion.push_back(static_cast<int>(Index(*r.condition.emotion)));
        pred_emotion.push_back(static_cast<int>(Index(j.emotion)));
      }
      if (r.condition.appraisals) {
        any_appraisal = true;
        for (Appraisal a : kAllAppraisals) {
          gold_app[Index(a)].push_back((*r.condition.appraisals)[Index(a)]);
          pred_app[Index(a)].push_back(j.appraisals[Index(a)]);
        }
      }
    }
  }
  if (k != judgments.size()) throw UsageError("more judgments than texts");
  if (report.n_invalid > 0) {
    report.warnings.push_back(std::to_string(report.n_invalid) +
                              " empty texts excluded from F1");
  }

  if (any_emotion) {
    const F1Report f1 = MulticlassF1(gold_emotion, pred_emotion, kNumEmotions);
    for (Emotion e : kAllEmotions) {
      report.per_emotion_f1[e] = f1.per_class[Index(e)].f1;
      if (!f1.per_class[Index(e)].f1) {
        report.warnings.push_back("no texts conditioned on " +
                                  std::string(EmotionName(e)) + "; F1 absent");
      }
    }
    report.macro_f1 = f1.macro_f1;
  }
  if (any_appraisal) {
    std::vector<std::optional<double>> f1s;
    for (Appraisal a : kAllAppraisals) {
      const ClassScores s = BinaryScores(gold_app[Index(a)], pred_app[Index(a)]);
      report.per_appraisal_f1[a] = s.f1;
      if (!s.f1) {
        report.warnings.push_back("no texts conditioned with " +
                                  std::string(AppraisalName(a)) + " on; F1 absent");
      }
      f1s.push_back(s.f1);
    }
    report.appraisal_macro_f1 = MacroAverage(f1s);
  }
  for (const auto& w : report.warnings) spdlog::debug("{}: {}", cell.ToString(), w);
  return report;
}

EvaluationReport ScoreCell(const CellId& cell,
                           std::span<const GenerationResult> results,
                           const Judges& judges, const ScoreOptions& options) {
  const auto texts = CellTexts(results, options);
  const auto judgments = JudgeTexts(judges, texts);
  return ScoreCell(cell, results, judgments, options);
}

namespace {

template <typename Key, std::size_t N>
std::string RenderGrid(std::span<const EvaluationReport> reports,
                       const std::array<std::string_view, N>& headers,
                       const std::array<Key, N>& keys, bool appraisal) {
  std::string out = fmt::format("{:<10}{:<6}{:<7}", "Arch.", "Conf.", "Set");
  for (auto h : headers) out += fmt::format("{:>7}", h);
  out += fmt::format("{:>8}\n", "M.Avg.");
  for (const auto& r : reports) {
    out += fmt::format("{:<10}{:<6}{:<7}", r.cell.architecture, r.cell.config, r.cell.set);
    for (const auto& k : keys) {
      std::optional<double> v;
      if constexpr (std::is_same_v<Key, Emotion>) {
        auto it = r.per_emotion_f1.find(k);
        if (it != r.per_emotion_f1.end()) v = it->second;
      } else {
        auto it = r.per_appraisal_f1.find(k);
        if (it != r.per_appraisal_f1.end()) v = it->second;
      }
      out += fmt::format("{:>7}", Cell(v));
    }
    out += fmt::format("{:>8}\n", Cell(appraisal ? r.appraisal_macro_f1 : r.macro_f1));
  }
  return out;
}

}  // namespace

std::string RenderEmotionTable(std::span<const EvaluationReport> reports) {
  static constexpr std::array<std::string_view, kNumEmotions> kHeaders = {
      "Ang.", "Disg.", "Fear", "Guilt", "Joy", "Sad.", "Shame"};
  return RenderGrid(reports, kHeaders, kAllEmotions, false);
}

std::string RenderAppraisalTable(std::span<const EvaluationReport> reports) {
  static constexpr std::array<std::string_view, kNumAppraisals> kHeaders = {
      "Att.", "Resp.", "Contr.", "Circ.", "Plea.", "Effo.", "Cert."};
  return RenderGrid(reports, kHeaders, kAllAppraisals, true);
}

}  // namespace cnlg
