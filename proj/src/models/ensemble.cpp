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

// Decision trees, random forests and gradient boosting.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deskml/common/hash.hpp"
#include "learners.hpp"

namespace deskml::models::detail {

namespace {

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

LeafValue class_distribution(std::span<const double> y, std::size_t classes) {
  return [y, classes](std::span<const std::uint32_t> rows) {
    std::vector<double> v(classes, 0.0);
    for (auto r : rows) v[static_cast<std::size_t>(y[r])] += 1.0;
    for (auto& c : v) c /= static_cast<double>(rows.size());
    return v;
  };
}

// Hard vote for the majority class; ties go to the lower class index.
LeafValue class_vote(std::span<const double> y, std::size_t classes) {
  return [y, classes](std::span<const std::uint32_t> rows) {
    std::vector<double> v(classes, 0.0);
    for (auto r : rows) v[static_cast<std::size_t>(y[r])] += 1.0;
    const auto best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    std::fill(v.begin(), v.end(), 0.0);
    v[best] = 1.0;
    return v;
  };
}

LeafValue mean_value(std::span<const double> y) {
  return [y](std::span<const std::uint32_t> rows) {
    double s = 0.0;
    for (auto r : rows) s += y[r];
    return std::vector<double>{s / static_cast<double>(rows.size())};
  };
}

std::size_t features_per_split(const std::string& rule, std::size_t d) {
  if (rule == "sqrt") return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  if (rule == "log2") return std::max<std::size_t>(1, static_cast<std::size_t>(std::log2(static_cast<double>(std::max<std::size_t>(d, 1)))));
  return 0;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

EnsembleParams fit_decision_tree(FitInput& in) {
  const RankedFeatures ranked(in.x);
  const bool cls = in.y.task == Task::kClassification;
  const std::size_t k = in.y.classes.size();
  TreeGrowth growth{hp_int(in.hp, "max_depth"), hp_int(in.hp, "min_leaf"), 0};
  auto tree = grow_tree(ranked, in.y.values, k, cls ? SplitCriterion::kGini : SplitCriterion::kVariance, growth,
                        all_rows(in.x.rows()), cls ? class_distribution(in.y.values, k) : mean_value(in.y.values),
                        nullptr, &in.ops);
  EnsembleParams p;
  p.combiner = Combiner::kMean;
  p.groups = {{TreePtr(std::move(tree))}};
  return p;
}

EnsembleParams fit_random_forest(FitInput& in) {
  const RankedFeatures ranked(in.x);
  const bool cls = in.y.task == Task::kClassification;
  const std::size_t k = in.y.classes.size();
  const std::size_t n = in.x.rows();
  TreeGrowth growth{hp_int(in.hp, "max_depth"), hp_int(in.hp, "min_leaf"),
                    features_per_split(hp_string(in.hp, "max_features"), in.x.cols())};
  const auto leaf = cls ? class_vote(in.y.values, k) : mean_value(in.y.values);
  EnsembleParams p;
  p.combiner = Combiner::kMean;
  p.groups.resize(1);
  const int trees = hp_int(in.hp, "trees");
  for (int t = 0; t < trees; ++t) {
    Rng rng(derive_seed(in.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::uint32_t> sample(n);
    for (auto& r : sample) r = static_cast<std::uint32_t>(rng.index(n));
    std::sort(sample.begin(), sample.end());
    const auto criterion = cls ? SplitCriterion::kGini : SplitCriterion::kVariance;
    p.groups[0].push_back(TreePtr(grow_tree(ranked, in.y.values, k, criterion, growth, std::move(sample), leaf, &rng, &in.ops)));
  }
  return p;
}

EnsembleParams fit_gradient_boosting(FitInput& in) {
  const RankedFeatures ranked(in.x);
  const std::size_t n = in.x.rows();
  const bool cls = in.y.task == Task::kClassification;
  const std::size_t k = in.y.classes.size();
  const int estimators = hp_int(in.hp, "estimators");
  const double lr = hp_real(in.hp, "learning_rate");
  const TreeGrowth growth{hp_int(in.hp, "max_depth"), hp_int(in.hp, "min_leaf"), 0};

  EnsembleParams p;
  p.combiner = Combiner::kSumShrinkage;
  p.learning_rate = lr;
  const std::size_t outputs = !cls ? 1 : (k <= 2 ? 1 : k);
  p.transform = !cls ? OutputTransform::kIdentity : (k <= 2 ? OutputTransform::kSigmoid : OutputTransform::kOvrSigmoid);
  p.base.assign(outputs, 0.0);
  p.groups.resize(outputs);

  std::vector<double> target(n), residual(n), hessian(n), score(n);
  for (std::size_t o = 0; o < outputs; ++o) {
    // Output o fits class (o or 1 for binary) against the rest, or the raw target.
    const double positive = k <= 2 ? 1.0 : static_cast<double>(o);
    for (std::size_t r = 0; r < n; ++r) target[r] = cls ? (in.y.values[r] == positive ? 1.0 : 0.0) : in.y.values[r];
    double base = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(n);
    if (cls) {
      base = std::clamp(base, 1e-6, 1.0 - 1e-6);
      base = std::log(base / (1.0 - base));
    }
    p.base[o] = base;
    std::fill(score.begin(), score.end(), base);

    LeafValue leaf;
    if (cls) {
      // One Newton step on the log-loss per leaf.
      leaf = [&](std::span<const std::uint32_t> rows) {
        double g = 0.0, h = 0.0;
        for (auto r : rows) g += residual[r], h += hessian[r];
        return std::vector<double>{g / std::max(h, 1e-12)};
      };
    } else {
      leaf = mean_value(residual);
    }
    for (int m = 0; m < estimators; ++m) {
      for (std::size_t r = 0; r < n; ++r) {
        if (cls) {
          const double pr = sigmoid(score[r]);
          residual[r] = target[r] - pr;
          hessian[r] = pr * (1.0 - pr);
        } else {
          residual[r] = target[r] - score[r];
        }
      }
      auto tree = grow_tree(ranked, residual, 0, SplitCriterion::kVariance, growth, all_rows(n), leaf, nullptr, &in.ops);
      for (std::size_t r = 0; r < n; ++r) score[r] += lr * find_leaf(*tree, in.x.row(r)).value[0];
      in.ops += n * static_cast<std::uint64_t>(growth.max_depth);
      p.groups[o].push_back(TreePtr(std::move(tree)));
    }
  }
  return p;
}

}  // namespace deskml::models::detail
