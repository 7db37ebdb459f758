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

#ifndef CNLG_METRICS_H_
#define CNLG_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cnlg {

inline constexpr int kNoPrediction = -1;

struct ClassScores {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Number of gold instances of the class.
  std::size_t support = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  // 2tp / (2tp + fp + fn); undefined when the class has no gold instances.
  std::optional<double> f1;
};

struct F1Report {
  std::vector<ClassScores> per_class;
  // Unweighted mean over the classes whose F1 is defined.
  std::optional<double> macro_f1;
  std::vector<std::string> warnings;
};

// Single-label F1 per class. `pred` may hold kNoPrediction, which counts as
// a miss for the gold class and a false positive for none.
F1Report MulticlassF1(std::span<const int> gold, std::span<const int> pred,
                      std::size_t num_classes);

// Positive-class scores of a binary task.
ClassScores BinaryScores(std::span<const bool> gold, std::span<const bool> pred);
ClassScores BinaryScores(const std::vector<bool>& gold, const std::vector<bool>& pred);

// Mean of the defined values, or nullopt when none is defined.
std::optional<double> MacroAverage(std::span<const std::optional<double>> values);

// Pearson product-moment correlation. Needs two equally sized samples with
// non-zero variance.
double PearsonCorrelation(std::span<const double> x, std::span<const double> y);

}  // namespace cnlg

#endif  // CNLG_METRICS_H_
