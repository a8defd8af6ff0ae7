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

#include "deskml/common/error.hpp"
#include "deskml/common/rng.hpp"
#include "deskml/models/model.hpp"

namespace deskml::models {
namespace {

Matrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

std::vector<std::string> names(std::size_t d) {
  std::vector<std::string> n;
  for (std::size_t j = 0; j < d; ++j) n.push_back("x" + std::to_string(j));
  return n;
}

TargetValues classes(std::vector<double> codes, std::size_t k) {
  TargetValues t{Task::kClassification, std::move(codes), {}};
  for (std::size_t c = 0; c < k; ++c) t.classes.push_back("c" + std::to_string(c));
  return t;
}

TargetValues reals(std::vector<double> v) { return {Task::kRegression, std::move(v), {}}; }

struct Blob {
  Matrix x;
  TargetValues y;
};

Blob random_classification(Rng& rng, std::size_t n, std::size_t d, std::size_t k) {
  Blob b{Matrix(n, d), classes({}, k)};
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = r % k;
    b.y.values.push_back(static_cast<double>(c));
    for (std::size_t j = 0; j < d; ++j) b.x(r, j) = rng.normal(static_cast<double>(c) * (j % 2 ? 1.0 : -0.5), 1.0);
  }
  return b;
}

Blob random_regression(Rng& rng, std::size_t n, std::size_t d) {
  Blob b{Matrix(n, d), reals({})};
  for (std::size_t r = 0; r < n; ++r) {
    double y = 0.5;
    for (std::size_t j = 0; j < d; ++j) {
      b.x(r, j) = rng.normal();
      y += (j + 1.0) * b.x(r, j);
    }
    b.y.values.push_back(y + rng.normal(0, 0.1));
  }
  return b;
}

const std::vector<Family> kTabular{Family::kLinearRegression, Family::kRidge,        Family::kLogisticRegression,
                                   Family::kGaussianNb,       Family::kKnn,          Family::kDecisionTree,
                                   Family::kRandomForest,     Family::kGradientBoosting};

TEST(RegistryTest, EveryFamilyHasTasksAndRank) {
  EXPECT_EQ(family_registry().size(), 12u);
  for (const auto& info : family_registry()) {
    EXPECT_FALSE(info.tasks.empty()) << info.name;
    EXPECT_GE(info.interpretability_rank, 1);
    EXPECT_LE(info.interpretability_rank, 5);
    EXPECT_EQ(family_from_name(info.name), info.family);
  }
  EXPECT_EQ(family_info(Family::kLogisticRegression).interpretability_rank, 1);
  EXPECT_EQ(family_info(Family::kGaussianNb).interpretability_rank, 1);
  EXPECT_EQ(family_info(Family::kDecisionTree).interpretability_rank, 2);
  EXPECT_EQ(family_info(Family::kKnn).interpretability_rank, 3);
  EXPECT_EQ(family_info(Family::kRandomForest).interpretability_rank, 4);
  EXPECT_EQ(family_info(Family::kGradientBoosting).interpretability_rank, 4);
  EXPECT_THROW(family_from_name("svm"), Error);
}

TEST(SearchSpaceTest, GaussianNbHasOnlyLogScaleSmoothing) {
  const auto& s = search_space(Family::kGaussianNb);
  ASSERT_EQ(s.params().size(), 1u);
  EXPECT_EQ(s.params()[0].name, "var_smoothing");
  EXPECT_TRUE(s.params()[0].log_scale);
}

TEST(SearchSpaceTest, KnnHasIntegerKFromOne) {
  const auto& s = search_space(Family::kKnn);
  auto it = std::find_if(s.params().begin(), s.params().end(), [](const auto& p) { return p.name == "k"; });
  ASSERT_NE(it, s.params().end());
  EXPECT_EQ(it->kind, ParamKind::kInteger);
  EXPECT_EQ(it->lo, 1.0);
}

TEST(SearchSpaceTest, DocumentedRanges) {
  const auto& rf = search_space(Family::kRandomForest).params();
  EXPECT_EQ(rf[0].lo, 10);
  EXPECT_EQ(rf[0].hi, 200);
  EXPECT_EQ(rf[1].lo, 2);
  EXPECT_EQ(rf[1].hi, 16);
  EXPECT_EQ(rf[2].lo, 1);
  EXPECT_EQ(rf[2].hi, 20);
  const auto& ridge = search_space(Family::kRidge).params();
  EXPECT_EQ(ridge[0].lo, 1e-4);
  EXPECT_EQ(ridge[0].hi, 1e2);
  EXPECT_TRUE(ridge[0].log_scale);
}

TEST(SearchSpaceTest, SamplingIsSeedDeterministic) {
  Rng a(7), b(7);
  EXPECT_EQ(search_space(Family::kRandomForest).sample(a), search_space(Family::kRandomForest).sample(b));
}

TEST(SearchSpacePropertyTest, DefaultsAndSamplesWithinBounds) {
  Rng rng(1);
  for (const auto& info : family_registry()) {
    const auto& s = search_space(info.family);
    EXPECT_TRUE(s.contains(s.defaults())) << info.name;
    for (int i = 0; i < 500; ++i) {
      const auto hp = s.sample(rng);
      ASSERT_TRUE(s.contains(hp)) << info.name << " " << hp.dump();
    }
  }
}

TEST(SearchSpaceTest, ResolveRejectsOutOfSpace) {
  const auto& s = search_space(Family::kKnn);
  EXPECT_EQ(s.resolve(Json{{"k", 3}})["weights"], "uniform");
  EXPECT_THROW(s.resolve(Json{{"k", 0}}), Error);
  EXPECT_THROW(s.resolve(Json{{"depth", 3}}), Error);
}

TEST(KnnTest, OneNeighbourReproducesTrainingLabels) {
  Rng rng(4);
  auto b = random_classification(rng, 60, 3, 3);
  auto m = fit(Family::kKnn, Json{{"k", 1}}, b.x, names(3), b.y);
  EXPECT_EQ(predict(m, b.x).values, b.y.values);
}

TEST(DecisionTreeTest, XorAtDepthTwo) {
  // Hand enumeration: the root split on either input has zero Gini gain but
  // each child is then separated perfectly by the other input.
  auto x = matrix({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  auto m = fit(Family::kDecisionTree, Json{{"max_depth", 2}}, x, names(2), classes({0, 1, 1, 0}, 2));
  EXPECT_EQ(predict(m, x).values, (std::vector<double>{0, 1, 1, 0}));
  EXPECT_EQ(parameter_count(m), 7u);
}

TEST(DecisionTreeTest, DepthOneHasThreeNodes) {
  auto x = matrix({{1}, {2}, {3}, {4}});
  auto m = fit(Family::kDecisionTree, Json{{"max_depth", 1}}, x, names(1), classes({0, 0, 1, 1}, 2));
  const auto& tree = *std::get<EnsembleParams>(m.params).groups[0][0];
  EXPECT_EQ(node_count(tree), 3u);
  EXPECT_EQ(tree.threshold, 2.5);
}

TEST(DecisionTreeTest, TieBreaksByLowestFeatureThenThreshold) {
  // Both features separate the classes equally well; feature 0 must win.
  auto x = matrix({{0, 5}, {0, 5}, {1, 9}, {1, 9}});
  auto m = fit(Family::kDecisionTree, Json{{"max_depth", 1}}, x, names(2), classes({0, 0, 1, 1}, 2));
  EXPECT_EQ(std::get<EnsembleParams>(m.params).groups[0][0]->feature, 0);
}

TEST(LogisticTest, TwoSeparablePoints) {
  auto x = matrix({{-1}, {1}});
  auto m = fit(Family::kLogisticRegression, Json{{"l2", 1e-6}}, x, names(1), classes({0, 1}, 2));
  auto p = predict(m, x);
  EXPECT_EQ(p.values, (std::vector<double>{0, 1}));
  EXPECT_LT(p.probabilities(0, 1), 0.5);
  EXPECT_GT(p.probabilities(1, 1), 0.5);
}

TEST(LogisticPropertyTest, GradientMatchesCentralDifferences) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + rng.index(20), d = 1 + rng.index(4), k = 2 + rng.index(3);
    auto b = random_classification(rng, n, d, k);
    const std::size_t scores = k == 2 ? 1 : k;
    std::vector<double> theta(scores * (d + 1));
    for (auto& v : theta) v = rng.normal(0, 0.7);
    const double l2 = rng.uniform(0, 0.5);
    const auto lg = logistic_loss_and_gradient(b.x, b.y.values, k, theta, l2);
    double diff = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double h = 1e-5;
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (logistic_loss_and_gradient(b.x, b.y.values, k, plus, l2).loss -
                         logistic_loss_and_gradient(b.x, b.y.values, k, minus, l2).loss) /
                        (2 * h);
      diff += (fd - lg.gradient[i]) * (fd - lg.gradient[i]);
      norm_a += fd * fd;
      norm_b += lg.gradient[i] * lg.gradient[i];
    }
    EXPECT_LE(std::sqrt(diff) / std::max(std::sqrt(std::max(norm_a, norm_b)), 1e-12), 1e-6);
  }
}

TEST(GaussianNbTest, EquidistantPointIsEvenSplit) {
  auto x = matrix({{-2}, {0}, {2}, {4}});
  auto m = fit(Family::kGaussianNb, Json::object(), x, names(1), classes({0, 0, 1, 1}, 2));
  auto p = predict(m, matrix({{1}}));
  EXPECT_NEAR(p.probabilities(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(p.probabilities(0, 1), 0.5, 1e-12);
}

TEST(LinearRegressionTest, ExactLine) {
  auto x = matrix({{0}, {1}, {2}, {5}});
  auto m = fit(Family::kLinearRegression, Json::object(), x, names(1), reals({1, 3, 5, 11}));
  EXPECT_NEAR(predict(m, matrix({{10}})).values[0], 21.0, 1e-9);
}

TEST(RidgeTest, ShrinksTowardsMean) {
  auto x = matrix({{0}, {1}, {2}, {3}});
  auto small = fit(Family::kRidge, Json{{"alpha", 1e-4}}, x, names(1), reals({0, 2, 4, 6}));
  auto big = fit(Family::kRidge, Json{{"alpha", 100.0}}, x, names(1), reals({0, 2, 4, 6}));
  EXPECT_NEAR(std::get<LinearParams>(small.params).weights(0, 0), 2.0, 1e-3);
  // Closed form for one centred feature: w = sxy / (sxx + alpha) = 10 / 105.
  EXPECT_NEAR(std::get<LinearParams>(big.params).weights(0, 0), 10.0 / 105.0, 1e-12);
}

TEST(RandomForestTest, ProbabilityIsMeanOfTreeVotes) {
  Rng rng(8);
  auto b = random_classification(rng, 80, 4, 3);
  auto m = fit(Family::kRandomForest, Json{{"trees", 10}, {"max_depth", 3}}, b.x, names(4), b.y, {.seed = 5});
  auto& trees = std::get<EnsembleParams>(m.params).groups[0];
  trees.resize(5);  // hand count over five trees
  auto probe = random_classification(rng, 40, 4, 3).x;
  auto p = predict(m, probe);
  for (std::size_t r = 0; r < probe.rows(); ++r) {
    std::vector<int> votes(3, 0);
    for (const auto& t : trees) {
      const TreeNode* n = t.get();
      while (n->feature >= 0) n = probe(r, n->feature) <= n->threshold ? n->left.get() : n->right.get();
      votes[std::max_element(n->value.begin(), n->value.end()) - n->value.begin()]++;
    }
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(p.probabilities(r, c), votes[c] / 5.0);
  }
}

TEST(BoostingTest, FitsBinaryAndRegression) {
  Rng rng(2);
  auto b = random_classification(rng, 200, 3, 2);
  auto m = fit(Family::kGradientBoosting, Json::object(), b.x, names(3), b.y);
  auto p = predict(m, b.x);
  double correct = 0;
  for (std::size_t r = 0; r < p.values.size(); ++r) correct += p.values[r] == b.y.values[r];
  EXPECT_GT(correct / 200.0, 0.8);

  auto reg = random_regression(rng, 200, 2);
  auto mr = fit(Family::kGradientBoosting, Json{{"estimators", 200}}, reg.x, names(2), reg.y);
  auto pr = predict(mr, reg.x);
  double mse = 0, var = 0, mean = std::accumulate(reg.y.values.begin(), reg.y.values.end(), 0.0) / 200;
  for (std::size_t r = 0; r < 200; ++r) {
    mse += std::pow(pr.values[r] - reg.y.values[r], 2);
    var += std::pow(reg.y.values[r] - mean, 2);
  }
  EXPECT_LT(mse / var, 0.1);
}

TEST(ForecastTest, Examples) {
  Matrix none;
  auto naive = fit(Family::kNaiveForecaster, Json::object(), none, {}, {Task::kForecasting, {3, 5, 8}, {}});
  EXPECT_EQ(forecast(naive, 2), (std::vector<double>{8, 8}));
  auto drift = fit(Family::kDriftForecaster, Json::object(), none, {}, {Task::kForecasting, {1, 3}, {}});
  EXPECT_EQ(forecast(drift, 2), (std::vector<double>{5, 7}));
  auto seasonal = fit(Family::kSeasonalNaive, Json{{"season_length", 2}}, none, {},
                      {Task::kForecasting, {10, 20, 30, 40}, {}});
  EXPECT_EQ(forecast(seasonal, 2), (std::vector<double>{30, 40}));
  EXPECT_EQ(forecast(seasonal, 3), (std::vector<double>{30, 40, 30}));
}

TEST(ForecastTest, Errors) {
  Matrix none;
  auto naive = fit(Family::kNaiveForecaster, Json::object(), none, {}, {Task::kForecasting, {3}, {}});
  EXPECT_THROW(forecast(naive, 0), Error);
  std::vector<double> hist{1.0};
  auto seasonal = fit(Family::kSeasonalNaive, Json{{"season_length", 2}}, none, {}, {Task::kForecasting, {1, 2}, {}});
  try {
    forecast(seasonal, hist, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "HISTORY_TOO_SHORT");
  }
}

TEST(ForecastPropertyTest, SesWithUnitAlphaIsNaive) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> series(1 + rng.index(40));
    for (auto& v : series) v = rng.normal(10, 5);
    Matrix none;
    auto ses = fit(Family::kSesForecaster, Json{{"alpha", 1.0}}, none, {}, {Task::kForecasting, series, {}});
    auto naive = fit(Family::kNaiveForecaster, Json::object(), none, {}, {Task::kForecasting, series, {}});
    const int h = 1 + static_cast<int>(rng.index(10));
    EXPECT_EQ(forecast(ses, h), forecast(naive, h));
  }
}

TEST(PredictTest, ColumnMismatchNamesColumns) {
  auto x = matrix({{0, 1}, {1, 0}});
  auto m = fit(Family::kLogisticRegression, Json::object(), x, {"a", "b"}, classes({0, 1}, 2));
  const std::vector<std::string> cols{"a", "zz"};
  try {
    predict(m, x, cols);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "FEATURE_MISMATCH");
    EXPECT_NE(std::string(e.what()).find("missing: b"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("extra: zz"), std::string::npos);
  }
  const std::vector<std::string> swapped{"b", "a"};
  auto xs = matrix({{1, 0}, {0, 1}});
  EXPECT_EQ(predict(m, xs, swapped).values, predict(m, x).values);
}

TEST(FitTest, SingleClassIsDegenerate) {
  auto x = matrix({{0}, {1}, {2}});
  for (auto f : {Family::kLogisticRegression, Family::kRandomForest, Family::kKnn}) {
    auto m = fit(f, Json::object(), x, names(1), classes({1, 1, 1}, 2));
    EXPECT_TRUE(m.degenerate);
    auto p = predict(m, x);
    for (std::size_t r = 0; r < 3; ++r) {
      EXPECT_EQ(p.values[r], 1.0);
      EXPECT_EQ(p.probabilities(r, 1), 1.0);
    }
  }
}

TEST(FitTest, NonFiniteFeatureIsError) {
  auto x = matrix({{0}, {NAN}});
  EXPECT_THROW(fit(Family::kRidge, Json::object(), x, names(1), reals({1, 2})), Error);
  EXPECT_THROW(fit(Family::kLogisticRegression, Json::object(), x, names(1), reals({1, 2})), Error);
}

TEST(ModelPropertyTest, DeterministicSimplexAndRoundTrip) {
  Rng rng(31);
  for (int t = 0; t < 6; ++t) {
    const std::size_t k = 2 + rng.index(3);
    auto b = random_classification(rng, 30 + rng.index(120), 1 + rng.index(5), k);
    auto reg = random_regression(rng, 30 + rng.index(120), 1 + rng.index(5));
    for (auto f : kTabular) {
      const auto& space = search_space(f);
      const auto hp = space.sample(rng);
      const bool cls = supports(f, Task::kClassification);
      const Blob& data = cls ? b : reg;
      const auto seed = rng.next();
      auto m1 = fit(f, hp, data.x, names(data.x.cols()), data.y, {.seed = seed});
      auto m2 = fit(f, hp, data.x, names(data.x.cols()), data.y, {.seed = seed});
      ASSERT_EQ(to_json(m1).dump(), to_json(m2).dump()) << family_name(f);
      auto p = predict(m1, data.x);
      auto back = trained_model_from_json(Json::parse(to_json(m1).dump()));
      auto pb = predict(back, data.x);
      EXPECT_EQ(p.values, pb.values) << family_name(f);
      EXPECT_EQ(p.probabilities, pb.probabilities) << family_name(f);
      if (!cls) continue;
      for (std::size_t r = 0; r < p.probabilities.rows(); ++r) {
        double s = 0;
        for (double v : p.probabilities.row(r)) {
          EXPECT_GE(v, 0.0);
          EXPECT_LE(v, 1.0);
          s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-9) << family_name(f);
      }
      EXPECT_GT(explainability(m1), family_info(f).interpretability_rank);
    }
  }
}

TEST(ModelPropertyTest, RowPermutationInvariance) {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    auto b = random_classification(rng, 40 + rng.index(60), 3, 2 + rng.index(2));
    std::vector<std::size_t> perm(b.x.rows());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    Matrix xs = b.x.select_rows(perm);
    TargetValues ys = b.y;
    for (std::size_t i = 0; i < perm.size(); ++i) ys.values[i] = b.y.values[perm[i]];
    auto probe = random_classification(rng, 50, 3, 2).x;
    for (auto f : {Family::kKnn, Family::kGaussianNb, Family::kDecisionTree}) {
      auto a = predict(fit(f, Json::object(), b.x, names(3), b.y), probe);
      auto c = predict(fit(f, Json::object(), xs, names(3), ys), probe);
      EXPECT_EQ(a.values, c.values) << family_name(f);
      for (std::size_t i = 0; i < a.probabilities.data().size(); ++i) {
        EXPECT_NEAR(a.probabilities.data()[i], c.probabilities.data()[i], 1e-12);
      }
    }
  }
}

TEST(ResourceLogTest, ModelledTimingIsOpsBased) {
  Rng rng(3);
  auto b = random_classification(rng, 100, 3, 2);
  auto m = fit(Family::kRandomForest, Json::object(), b.x, names(3), b.y);
  EXPECT_EQ(m.resources.timing, TimingMode::kModelled);
  EXPECT_GT(m.resources.fit_ops, 0u);
  EXPECT_DOUBLE_EQ(m.resources.fit_seconds, m.resources.fit_ops / kNominalOpsPerSecond);
  auto measured = fit(Family::kRandomForest, Json::object(), b.x, names(3), b.y, {.timing = TimingMode::kMeasured});
  EXPECT_GT(measured.resources.fit_seconds, 0.0);
  EXPECT_GT(measured.resources.predict_seconds_per_1000, 0.0);
}

}  // namespace
}  // namespace deskml::models
