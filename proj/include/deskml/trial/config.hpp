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

#include <optional>
#include <string>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/data/table.hpp"
#include "deskml/eval/green.hpp"
#include "deskml/models/family.hpp"
#include "deskml/models/model.hpp"
#include "deskml/trial/genome.hpp"

namespace deskml::trial {

inline constexpr std::size_t kMaxObjectives = 3;

enum class ObjectiveKind { kLoss, kTrainingTime, kPredictionTime, kElectricity, kEmissions, kExplainability };

/// An objective as requested ("log_loss" is the loss objective measured with
/// log-loss). All objectives are minimised.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::kLoss;
  std::string name;

  friend bool operator==(const Objective&, const Objective&) = default;
};

/// Errors: "UNKNOWN_OBJECTIVE".
Objective objective_from_name(std::string_view name);

/// How the loss objective is measured.
enum class LossMetric { kOneMinusF1, kLogLoss, kRmse };
std::string_view loss_metric_name(LossMetric m) noexcept;

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct TrialConfig {
  std::string dataset_id;
  std::string target;
  std::optional<models::Task> task;  // inferred when absent
  std::optional<std::string> datetime_index;
  std::vector<Objective> objectives{{ObjectiveKind::kLoss, "loss"}};
  std::vector<std::string> include;
  std::vector<models::Family> families;  // empty = every family serving the task
  SearchToggles pipeline_search;
  std::size_t population = 16;
  std::size_t generations = 10;
  SplitRatios split;
  std::uint64_t seed = 0;
  models::TimingMode timing = models::TimingMode::kModelled;
  double threshold = 0.5;
  std::size_t workers = 0;  // 0 = hardware concurrency

  LossMetric loss_metric(models::Task task) const noexcept;
};

/// Parses and validates a trial request body. Errors: "OBJECTIVE_LIMIT"
/// (kUnprocessable) for zero or more than three objectives,
/// "DUPLICATE_OBJECTIVE", "UNKNOWN_OBJECTIVE", "INVALID_SPLIT",
/// "INVALID_BUDGET", "INVALID_CONFIG".
TrialConfig trial_config_from_json(const Json& j);
Json to_json(const TrialConfig& c);

/// Same checks as parsing, for configs built in code.
void validate(const TrialConfig& c);

/// categorical/boolean target -> classification; numeric -> regression, or
/// forecasting when a datetime index column is declared. An explicit task
/// always wins but must be compatible with the target column.
/// Errors: kNotFound "UNKNOWN_COLUMN"; kUnprocessable "TASK_OVERRIDE_REQUIRED"
/// for text/datetime targets; kUnprocessable "INCOMPATIBLE_TASK".
models::Task infer_task(const data::Table& table, const std::string& target,
                        const std::optional<std::string>& datetime_index,
                        std::optional<models::Task> requested = std::nullopt);

}  // namespace deskml::trial
