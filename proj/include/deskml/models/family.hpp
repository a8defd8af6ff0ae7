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

#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace deskml::models {

enum class Task { kClassification, kRegression, kForecasting };

std::string_view task_name(Task t) noexcept;
Task task_from_name(std::string_view name);

enum class Family {
  kLinearRegression,
  kRidge,
  kLogisticRegression,
  kGaussianNb,
  kKnn,
  kDecisionTree,
  kRandomForest,
  kGradientBoosting,
  kNaiveForecaster,
  kSeasonalNaive,
  kDriftForecaster,
  kSesForecaster,
};

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::vector<Task> tasks;
  int interpretability_rank;  // 1 most interpretable, 5 least
};

std::span<const FamilyInfo> family_registry() noexcept;
const FamilyInfo& family_info(Family f) noexcept;
std::string_view family_name(Family f) noexcept;

/// Throws Error(kInvalidArgument, "UNKNOWN_FAMILY").
Family family_from_name(std::string_view name);

bool supports(Family f, Task t) noexcept;
std::vector<Family> families_for(Task t);
bool is_forecaster(Family f) noexcept;

}  // namespace deskml::models
