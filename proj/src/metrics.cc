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

#include "cnlg/metrics.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cnlg/error.h"

namespace cnlg {
namespace {

void Finish(ClassScores& s) {
  if (s.tp + s.fp > 0) {
    s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
  }
  if (s.support > 0) {
    s.recall = static_cast<double>(s.tp) / static_cast<double>(s.support);
    s.f1 = 2.0 * static_cast<double>(s.tp) /
           static_cast<double>(2 * s.tp + s.fp + s.fn);
  }
}

}  // namespace

F1Report MulticlassF1(std::span<const int> gold, std::span<const int> pred,
                      std::size_t num_classes) {
  if (gold.size() != pred.size()) {
    throw UsageError("gold and predicted label counts differ");
  }
  F1Report report;
  report.per_class.resize(num_classes);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = gold[i];
    const int p = pred[i];
    if (g < 0 || static_cast<std::size_t>(g) >= num_classes ||
        (p != kNoPrediction && (p < 0 || static_cast<std::size_t>(p) >= num_classes))) {
      throw UsageError("label outside the class range");
    }
    ++report.per_class[static_cast<std::size_t>(g)].support;
    if (p == g) {
      ++report.per_class[static_cast<std::size_t>(g)].tp;
    } else {
      ++report.per_class[static_cast<std::size_t>(g)].fn;
      if (p != kNoPrediction) ++report.per_class[static_cast<std::size_t>(p)].fp;
    }
  }
  std::vector<std::optional<double>> f1s;
  for (std::size_t c = 0; c < num_classes; ++c) {
    Finish(report.per_class[c]);
    if (!report.per_class[c].f1) {
      report.warnings.push_back("class " + std::to_string(c) +
                                " has no gold instances; F1 undefined");
    }
    f1s.push_back(report.per_class[c].f1);
  }
  report.macro_f1 = MacroAverage(f1s);
  return report;
}

ClassScores BinaryScores(std::span<const bool> gold, std::span<const bool> pred) {
  if (gold.size() != pred.size()) {
    throw UsageError("gold and predicted label counts differ");
  }
  ClassScores s;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i]) ++s.support;
    if (gold[i] && pred[i]) ++s.tp;
    if (!gold[i] && pred[i]) ++s.fp;
    if (gold[i] && !pred[i]) ++s.fn;
  }
  Finish(s);
  return s;
}

ClassScores BinaryScores(const std::vector<bool>& gold, const std::vector<bool>& pred) {
  // vector<bool> is not contiguous; copy into plain arrays.
  std::unique_ptr<bool[]> g(new bool[gold.size()]);
  std::unique_ptr<bool[]> p(new bool[pred.size()]);
  std::copy(gold.begin(), gold.end(), g.get());
  std::copy(pred.begin(), pred.end(), p.get());
  return BinaryScores(std::span<const bool>(g.get(), gold.size()),
                      std::span<const bool>(p.get(), pred.size()));
}

std::optional<double> MacroAverage(std::span<const std::optional<double>> values) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double PearsonCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UsageError("correlation needs two samples of equal size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw DataError("correlation undefined for constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace cnlg
