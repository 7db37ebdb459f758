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

#include <cmath>

#include "cnlg/error.h"
#include "cnlg/metrics.h"
#include "cnlg/random.h"

namespace cnlg {
namespace {

// Reference: full confusion matrix, then per-class precision/recall/F1 as
// the harmonic mean, macro over classes with gold support.
struct RefF1 {
  std::vector<std::optional<double>> f1;
  std::optional<double> macro;
};

RefF1 ConfusionMatrixF1(const std::vector<int>& gold, const std::vector<int>& pred, int k) {
  // Row gold, column predicted; column k holds "no prediction".
  std::vector<std::vector<long>> m(static_cast<std::size_t>(k),
                                   std::vector<long>(static_cast<std::size_t>(k) + 1, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int col = pred[i] < 0 ? k : pred[i];
    ++m[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(col)];
  }
  RefF1 out;
  double sum = 0;
  int defined = 0;
  for (int c = 0; c < k; ++c) {
    long tp = m[c][c], row = 0, colsum = 0;
    for (int j = 0; j <= k; ++j) row += m[c][j];
    for (int r = 0; r < k; ++r) colsum += m[r][c];
    if (row == 0) {
      out.f1.push_back(std::nullopt);
      continue;
    }
    double f = 0;
    if (tp > 0) {
      const double p = static_cast<double>(tp) / colsum;
      const double r = static_cast<double>(tp) / row;
      f = 2 * p * r / (p + r);
    }
    out.f1.push_back(f);
    sum += f;
    ++defined;
  }
  if (defined) out.macro = sum / defined;
  return out;
}

TEST(Metrics, MatchesConfusionMatrixOn200RandomLabelings) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = static_cast<int>(rng.UniformInt(2, 7));
    const auto n = static_cast<std::size_t>(rng.UniformInt(1, 300));
    std::vector<int> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(rng.UniformInt(0, k - 1));
      pred[i] = static_cast<int>(rng.UniformInt(-1, k - 1));
    }
    const F1Report got = MulticlassF1(gold, pred, static_cast<std::size_t>(k));
    const RefF1 want = ConfusionMatrixF1(gold, pred, k);
    ASSERT_EQ(got.per_class.size(), want.f1.size());
    for (int c = 0; c < k; ++c) {
      const auto& g = got.per_class[static_cast<std::size_t>(c)].f1;
      const auto& w = want.f1[static_cast<std::size_t>(c)];
      ASSERT_EQ(g.has_value(), w.has_value()) << trial << "/" << c;
      if (g) EXPECT_NEAR(*g, *w, 1e-12) << trial << "/" << c;
    }
    ASSERT_EQ(got.macro_f1.has_value(), want.macro.has_value());
    if (got.macro_f1) EXPECT_NEAR(*got.macro_f1, *want.macro, 1e-12);
  }
}

TEST(Metrics, ConstantPredictorOnBalancedData) {
  std::vector<int> gold, pred;
  for (int rep = 0; rep < 13; ++rep) {
    for (int c = 0; c < 7; ++c) {
      gold.push_back(c);
      pred.push_back(0);
    }
  }
  const F1Report r = MulticlassF1(gold, pred, 7);
  EXPECT_DOUBLE_EQ(*r.per_class[0].f1, 0.25);
  for (int c = 1; c < 7; ++c) EXPECT_DOUBLE_EQ(*r.per_class[static_cast<std::size_t>(c)].f1, 0.0);
  EXPECT_NEAR(*r.macro_f1, 0.25 / 7, 1e-15);
}

TEST(Metrics, UndefinedClassesAreExcludedAndWarned) {
  const std::vector<int> gold = {0, 0, 1};
  const std::vector<int> pred = {0, 2, 1};
  const F1Report r = MulticlassF1(gold, pred, 3);
  EXPECT_FALSE(r.per_class[2].f1);
  EXPECT_EQ(r.per_class[2].fp, 1u);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_NEAR(*r.macro_f1, (2.0 / 3.0 + 1.0) / 2, 1e-12);
}

TEST(Metrics, SizeMismatchAndBadLabels) {
  EXPECT_THROW(MulticlassF1(std::vector<int>{0}, std::vector<int>{}, 2), UsageError);
  EXPECT_THROW(MulticlassF1(std::vector<int>{5}, std::vector<int>{0}, 2), UsageError);
}

TEST(Metrics, Binary) {
  const std::vector<bool> gold = {true, true, false, false, true};
  const std::vector<bool> pred = {true, false, true, false, true};
  const ClassScores s = BinaryScores(gold, pred);
  EXPECT_EQ(s.tp, 2u);
  EXPECT_EQ(s.fp, 1u);
  EXPECT_EQ(s.fn, 1u);
  EXPECT_NEAR(*s.f1, 4.0 / 6.0, 1e-12);
  EXPECT_FALSE(BinaryScores(std::vector<bool>{false}, std::vector<bool>{true}).f1);
}

TEST(Metrics, MacroAverageSkipsUndefined) {
  const std::vector<std::optional<double>> v = {0.5, std::nullopt, 1.0};
  EXPECT_DOUBLE_EQ(*MacroAverage(v), 0.75);
  const std::vector<std::optional<double>> none = {std::nullopt};
  EXPECT_FALSE(MacroAverage(none));
}

TEST(Metrics, Pearson) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 4, 5, 4, 5};
  // Hand computed: 6 / sqrt(10 * 6).
  EXPECT_NEAR(PearsonCorrelation(x, y), 6.0 / std::sqrt(60.0), 1e-12);
  const std::vector<double> neg = {5, 4, 3, 2, 1};
  EXPECT_NEAR(PearsonCorrelation(x, neg), -1.0, 1e-12);
  const std::vector<double> flat = {1, 1, 1, 1, 1};
  EXPECT_THROW(PearsonCorrelation(x, flat), Error);
}

}  // namespace
}  // namespace cnlg
