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

#include "deskml/models/family.hpp"

#include <algorithm>
#include <string>

#include "deskml/common/error.hpp"

namespace deskml::models {

namespace {

const std::vector<FamilyInfo>& registry() {
  using enum Task;
  static const std::vector<FamilyInfo> r{
      {Family::kLinearRegression, "linear_regression", {kRegression}, 1},
      {Family::kRidge, "ridge", {kRegression}, 1},
      {Family::kLogisticRegression, "logistic_regression", {kClassification}, 1},
      {Family::kGaussianNb, "gaussian_nb", {kClassification}, 1},
      {Family::kKnn, "knn", {kClassification, kRegression}, 3},
      {Family::kDecisionTree, "decision_tree", {kClassification, kRegression}, 2},
      {Family::kRandomForest, "random_forest", {kClassification, kRegression}, 4},
      {Family::kGradientBoosting, "gradient_boosting", {kClassification, kRegression}, 4},
      {Family::kNaiveForecaster, "naive_forecaster", {kForecasting}, 1},
      {Family::kSeasonalNaive, "seasonal_naive", {kForecasting}, 1},
      {Family::kDriftForecaster, "drift_forecaster", {kForecasting}, 1},
      {Family::kSesForecaster, "ses_forecaster", {kForecasting}, 1},
  };
  return r;
}

}  // namespace

std::string_view task_name(Task t) noexcept {
  switch (t) {
    case Task::kClassification: return "classification";
    case Task::kRegression: return "regression";
    case Task::kForecasting: return "forecasting";
  }
  return "classification";
}

Task task_from_name(std::string_view name) {
  for (auto t : {Task::kClassification, Task::kRegression, Task::kForecasting}) {
    if (task_name(t) == name) return t;
  }
  fail(ErrorKind::kInvalidArgument, "UNKNOWN_TASK", "unknown task '" + std::string(name) + "'");
}

std::span<const FamilyInfo> family_registry() noexcept { return registry(); }

const FamilyInfo& family_info(Family f) noexcept { return registry()[static_cast<std::size_t>(f)]; }

std::string_view family_name(Family f) noexcept { return family_info(f).name; }

Family family_from_name(std::string_view name) {
  for (const auto& info : registry()) {
    if (info.name == name) return info.family;
  }
  fail(ErrorKind::kInvalidArgument, "UNKNOWN_FAMILY", "unknown model family '" + std::string(name) + "'");
}

bool supports(Family f, Task t) noexcept {
  const auto& tasks = family_info(f).tasks;
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

std::vector<Family> families_for(Task t) {
  std::vector<Family> out;
  for (const auto& info : registry()) {
    if (supports(info.family, t)) out.push_back(info.family);
  }
  return out;
}

bool is_forecaster(Family f) noexcept { return supports(f, Task::kForecasting); }

}  // namespace deskml::models
