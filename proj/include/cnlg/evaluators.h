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

#ifndef CNLG_EVALUATORS_H_
#define CNLG_EVALUATORS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnlg/corpus.h"
#include "cnlg/generator.h"
#include "cnlg/io.h"
#include "cnlg/metrics.h"
#include "cnlg/testsets.h"

namespace cnlg {

struct ClassifierParams {
  int epochs = 10;
  int batch_size = 5;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 0;

  Json ToJson() const;
  static ClassifierParams FromJson(const Json& j);
};

// Text classifier contract behind every judge.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual std::string Identity() const = 0;
  virtual std::size_t NumClasses() const = 0;
  virtual void Fit(std::span<const std::string> texts, std::span<const int> labels,
                   const ClassifierParams& params) = 0;
  // Sums to 1.
  virtual std::vector<double> PredictProba(std::string_view text) const = 0;
  virtual Json ToJson() const = 0;
};

// Softmax regression over lowercase unigram and bigram indicators.
class BowLogisticRegression : public ClassifierBackend {
 public:
  explicit BowLogisticRegression(std::size_t num_classes);

  std::string Identity() const override { return "bow-logreg"; }
  std::size_t NumClasses() const override { return num_classes_; }
  void Fit(std::span<const std::string> texts, std::span<const int> labels,
           const ClassifierParams& params) override;
  std::vector<double> PredictProba(std::string_view text) const override;
  Json ToJson() const override;
  static std::unique_ptr<BowLogisticRegression> FromJson(const Json& j);

  static std::vector<std::string> Features(std::string_view text);

 private:
  std::vector<int> FeatureIds(std::string_view text) const;

  std::size_t num_classes_;
  std::map<std::string, int> features_;
  // num_classes x (features + 1 bias)
  std::vector<std::vector<double>> weights_;
};

struct Judgment {
  bool valid = false;
  Emotion emotion = Emotion::kAnger;
  AppraisalVector appraisals{};
};

// One seven-way emotion classifier and seven binary appraisal classifiers.
struct Judges {
  std::unique_ptr<ClassifierBackend> emotion;
  std::array<std::unique_ptr<ClassifierBackend>, kNumAppraisals> appraisals;
  // Positive-class probability at or above which an appraisal is predicted.
  double threshold = 0.5;

  void Save(const std::filesystem::path& dir) const;
  static Judges Load(const std::filesystem::path& dir);
};

struct JudgeMetrics {
  F1Report emotion;
  std::array<ClassScores, kNumAppraisals> appraisals;
  std::optional<double> appraisal_macro_f1;

  Json ToJson() const;
};

// Trains on classifier_train and evaluates on classifier_eval. Throws
// DataError when either is empty or an appraisal has a single class in
// training data.
Judges TrainJudges(const CorpusSplit& split, const ClassifierParams& params,
                   JudgeMetrics* metrics = nullptr);

// Order-preserving. Empty or whitespace-only texts come back invalid.
std::vector<Judgment> JudgeTexts(const Judges& judges,
                                 std::span<const std::string> texts);

struct CellId {
  std::string architecture;
  std::string config;
  std::string set;

  // "ARCH:CONFIG:SET".
  static CellId Parse(std::string_view spec);
  std::string ToString() const;
};

struct EvaluationReport {
  CellId cell;
  std::map<Emotion, std::optional<double>> per_emotion_f1;
  std::optional<double> macro_f1;
  std::map<Appraisal, std::optional<double>> per_appraisal_f1;
  std::optional<double> appraisal_macro_f1;
  std::optional<double> perplexity;
  std::size_t n_texts = 0;
  std::size_t n_invalid = 0;
  std::vector<std::string> warnings;

  Json ToJson() const;
  static EvaluationReport FromJson(const Json& j);
};

struct ScoreOptions {
  // Score only the best candidate per prompt instead of all of them.
  bool top1_only = false;
};

// Gold labels are the conditions the texts were generated under. Emotions
// are scored for conditions with an emotion, appraisals for conditions with
// an appraisal vector (positive-class F1 per appraisal).
EvaluationReport ScoreCell(const CellId& cell,
                           std::span<const GenerationResult> results,
                           std::span<const Judgment> judgments,
                           const ScoreOptions& options = {});
EvaluationReport ScoreCell(const CellId& cell,
                           std::span<const GenerationResult> results,
                           const Judges& judges, const ScoreOptions& options = {});

// Texts in the order ScoreCell consumes them.
std::vector<std::string> CellTexts(std::span<const GenerationResult> results,
                                   const ScoreOptions& options = {});

// Fixed-width grid with one row per report: architecture, configuration,
// prompt set, seven emotion F1 columns and the macro average.
std::string RenderEmotionTable(std::span<const EvaluationReport> reports);
// Same shape over the seven appraisals.
std::string RenderAppraisalTable(std::span<const EvaluationReport> reports);

}  // namespace cnlg

#endif  // CNLG_EVALUATORS_H_
