// Copyright 2026 The deskml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "deskml/common/error.hpp"
#include "deskml/common/rng.hpp"
#include "deskml/eval/green.hpp"
#include "deskml/eval/metrics.hpp"

namespace deskml::eval {
namespace {

const std::vector<std::string> kBinary{"0", "1"};

Matrix binary_probs(const std::vector<double>& p1) {
  Matrix m(p1.size(), 2);
  for (std::size_t r = 0; r < p1.size(); ++r) {
    m(r, 0) = 1.0 - p1[r];
    m(r, 1) = p1[r];
  }
  return m;
}

// P(score+ > score-) + 0.5 P(tie) over all positive/negative pairs.
double pair_counting_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& pos) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!pos[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (pos[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

TEST(ClassificationReportTest, PerfectPredictions) {
  std::vector<double> y{0, 1, 1, 0};
  auto r = classification_report(y, binary_probs({0, 1, 1, 0}), kBinary);
  const auto& m = *r.classification;
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1, 1.0);
  EXPECT_NEAR(m.log_loss, -std::log(1 - 1e-15), 1e-20);
  EXPECT_EQ(*m.curves.at(0).auc, 1.0);
}

TEST(ClassificationReportTest, HandCountedConfusion) {
  // y_true [1,0,1,1], predictions [1,0,0,1]: TP=2, TN=1, FP=0, FN=1.
  std::vector<double> y{1, 0, 1, 1};
  auto r = classification_report(y, binary_probs({0.9, 0.2, 0.3, 0.8}), kBinary);
  const auto& m = *r.classification;
  EXPECT_EQ(m.confusion.counts[1][1], 2u);
  EXPECT_EQ(m.confusion.counts[0][0], 1u);
  EXPECT_EQ(m.confusion.counts[0][1], 0u);
  EXPECT_EQ(m.confusion.counts[1][0], 1u);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1, 0.8);
  EXPECT_EQ(m.confusion.total(), 4u);
}

TEST(ClassificationReportTest, ThresholdIsStrict) {
  std::vector<double> y{1};
  auto r = classification_report(y, binary_probs({0.5}), kBinary, 0.5);
  EXPECT_EQ(r.classification->confusion.counts[1][0], 1u);
  EXPECT_THROW(classification_report(y, binary_probs({0.5}), kBinary, 1.0), Error);
}

TEST(ClassificationReportTest, UnknownClassIsError) {
  std::vector<double> y{2};
  try {
    classification_report(y, binary_probs({0.5}), kBinary);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UNKNOWN_CLASS");
  }
}

TEST(ClassificationReportTest, MulticlassMacroAverage) {
  // Classes a,b,c; predictions by argmax: a,b,b,c. Truth: a,b,c,c.
  Matrix p(4, 3, 0.0);
  p(0, 0) = 1;
  p(1, 1) = 1;
  p(2, 1) = 1;
  p(3, 2) = 1;
  std::vector<double> y{0, 1, 2, 2};
  const std::vector<std::string> labels{"a", "b", "c"};
  auto m = *classification_report(y, p, labels).classification;
  // Per class precision 1, 1/2, 1; recall 1, 1, 1/2.
  EXPECT_DOUBLE_EQ(m.precision, (1 + 0.5 + 1) / 3.0);
  EXPECT_DOUBLE_EQ(m.recall, (1 + 1 + 0.5) / 3.0);
  EXPECT_DOUBLE_EQ(m.f1, (1 + 2.0 / 3.0 + 2.0 / 3.0) / 3.0);
  EXPECT_EQ(m.curves.size(), 3u);
  EXPECT_FALSE(m.density.has_value());
}

TEST(ClassificationReportTest, DensityHistogramCountsPerClass) {
  std::vector<double> y{0, 0, 1, 1, 1};
  auto m = *classification_report(y, binary_probs({0.0, 0.04, 0.5, 0.97, 1.0}), kBinary).classification;
  ASSERT_TRUE(m.density);
  EXPECT_EQ(m.density->edges.size(), 21u);
  EXPECT_EQ(m.density->counts[0][0], 2u);
  EXPECT_EQ(m.density->counts[1][10], 1u);
  EXPECT_EQ(m.density->counts[1][19], 2u);
}

TEST(RegressionReportTest, Examples) {
  std::vector<double> y{0, 2}, pred{1, 1};
  auto m = *regression_report(y, pred).regression;
  EXPECT_EQ(m.mse, 1.0);
  EXPECT_EQ(m.mae, 1.0);
  EXPECT_EQ(*m.r2, 0.0);
  auto same = *regression_report(y, y).regression;
  EXPECT_EQ(same.mse, 0.0);
  EXPECT_EQ(*same.r2, 1.0);
  std::vector<double> flat{3, 3, 3}, p3{1, 2, 3};
  EXPECT_FALSE(regression_report(flat, p3).regression->r2.has_value());
  std::vector<double> one{1};
  EXPECT_THROW(regression_report(y, one), Error);
}

TEST(RocTest, ConstantScoresGiveHalf) {
  std::vector<double> s(6, 0.3);
  std::vector<std::uint8_t> pos{1, 0, 1, 0, 0, 1};
  auto pts = roc_points(s, pos);
  EXPECT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(roc_auc(pts), 0.5);
  EXPECT_THROW(roc_auc(std::span<const RocPoint>(pts).first(1)), Error);
}

TEST(RocTest, ScoresEqualToLabels) {
  std::vector<double> s{1, 0, 0, 1};
  std::vector<std::uint8_t> pos{1, 0, 0, 1};
  EXPECT_EQ(roc_auc(roc_points(s, pos)), 1.0);
}

TEST(RocPropertyTest, AucMatchesPairCountingAndIsMonotone) {
  Rng rng(50);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 50;
    std::vector<double> s(n);
    std::vector<std::uint8_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      pos[i] = rng.bernoulli(0.4);
      // Coarse grid so ties occur.
      s[i] = std::round(rng.uniform() * 10) / 10 + (pos[i] ? 0.1 : 0.0);
    }
    if (std::count(pos.begin(), pos.end(), 1) == 0 || std::count(pos.begin(), pos.end(), 0) == 0) continue;
    auto pts = roc_points(s, pos);
    EXPECT_NEAR(roc_auc(pts), pair_counting_auc(s, pos), 1e-9);
    std::set<double> distinct(s.begin(), s.end());
    EXPECT_LE(pts.size(), distinct.size() + 1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_GE(pts[i].fpr, pts[i - 1].fpr);
      EXPECT_GE(pts[i].tpr, pts[i - 1].tpr);
    }
  }
}

TEST(MetricsPropertyTest, MicroIdentityBoundsAndPermutationInvariance) {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.index(80);
    const std::size_t k = 2 + rng.index(3);
    std::vector<double> y(n);
    Matrix p(n, k);
    for (std::size_t r = 0; r < n; ++r) {
      y[r] = static_cast<double>(rng.index(k));
      double s = 0;
      for (std::size_t c = 0; c < k; ++c) s += p(r, c) = rng.uniform() + 1e-3;
      for (std::size_t c = 0; c < k; ++c) p(r, c) /= s;
    }
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < k; ++c) labels.push_back("c" + std::to_string(c));
    auto m = *classification_report(y, p, labels).classification;
    EXPECT_EQ(m.confusion.total(), n);
    for (double v : {m.accuracy, m.precision, m.recall, m.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GE(m.log_loss, 0.0);
    if (k == 2) {
      const auto& c = m.confusion.counts;
      EXPECT_EQ(m.accuracy, static_cast<double>(c[0][0] + c[1][1]) / static_cast<double>(n));
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<double> yp(n);
    for (std::size_t i = 0; i < n; ++i) yp[i] = y[perm[i]];
    auto mp = *classification_report(yp, p.select_rows(perm), labels).classification;
    EXPECT_EQ(mp.confusion.counts, m.confusion.counts);
    EXPECT_EQ(mp.accuracy, m.accuracy);
    EXPECT_EQ(mp.f1, m.f1);
    EXPECT_NEAR(mp.log_loss, m.log_loss, 1e-12);
    for (std::size_t c = 0; c < m.curves.size(); ++c) {
      ASSERT_EQ(mp.curves[c].auc.has_value(), m.curves[c].auc.has_value());
      if (m.curves[c].auc) EXPECT_NEAR(*mp.curves[c].auc, *m.curves[c].auc, 1e-12);
    }
  }
}

TEST(LogLossPropertyTest, CorrectingAConfidentMistakeLowersLoss) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.index(30);
    std::vector<double> y(n), p1(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<double>(rng.index(2));
      p1[i] = rng.uniform();
    }
    const std::size_t i = rng.index(n);
    p1[i] = y[i] == 1 ? 0.01 : 0.99;
    const double before = classification_report(y, binary_probs(p1), kBinary).classification->log_loss;
    p1[i] = y[i] == 1 ? 0.99 : 0.01;
    EXPECT_LT(classification_report(y, binary_probs(p1), kBinary).classification->log_loss, before);
  }
}

TEST(GreenTest, Examples) {
  auto a = green_estimate(3600, EnergyBasis::kTraining, {50, 0.233});
  EXPECT_DOUBLE_EQ(a.electricity_kwh, 0.05);
  auto z = green_estimate(0, EnergyBasis::kTraining, {});
  EXPECT_EQ(z.electricity_kwh, 0.0);
  EXPECT_EQ(z.carbon_kg, 0.0);
  auto b = green_estimate(7200, EnergyBasis::kPrediction, {100, 0.4});
  EXPECT_DOUBLE_EQ(b.electricity_kwh, 0.2);
  EXPECT_DOUBLE_EQ(b.carbon_kg, 0.08);
  EXPECT_EQ(b.carbon_kg, b.electricity_kwh * 0.4);
  EXPECT_THROW(green_estimate(-1, EnergyBasis::kTraining, {}), Error);
  EXPECT_THROW(green_estimate(1, EnergyBasis::kTraining, {0, 0.2}), Error);
  EXPECT_THROW(green_estimate(1, EnergyBasis::kTraining, {10, -0.2}), Error);
}

TEST(GreenPropertyTest, LinearInSeconds) {
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    const double s = rng.uniform(0, 1e5);
    const PowerConfig pc{rng.uniform(1, 500), rng.uniform(0, 1)};
    auto one = green_estimate(s, EnergyBasis::kTraining, pc);
    auto two = green_estimate(2 * s, EnergyBasis::kTraining, pc);
    EXPECT_EQ(two.electricity_kwh, 2 * one.electricity_kwh);
    EXPECT_EQ(two.carbon_kg, 2 * one.carbon_kg);
  }
}

TEST(ReportJsonTest, Schema) {
  std::vector<double> y{0, 1};
  auto j = to_json(classification_report(y, binary_probs({0.2, 0.7}), kBinary, 0.5, Split::kTest));
  EXPECT_EQ(j["split"], "test");
  EXPECT_TRUE(j["metrics"].contains("log_loss"));
  EXPECT_EQ(j["curves"][0]["roc"][0]["threshold"], "inf");
  EXPECT_EQ(j["density"]["counts"]["1"].size(), 20u);
}

}  // namespace
}  // namespace deskml::eval
