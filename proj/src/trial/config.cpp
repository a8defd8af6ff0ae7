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

#include "deskml/trial/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "deskml/common/error.hpp"

namespace deskml::trial {

Objective objective_from_name(std::string_view name) {
  if (name == "loss" || name == "log_loss") return {ObjectiveKind::kLoss, std::string(name)};
  if (name == "training_time") return {ObjectiveKind::kTrainingTime, std::string(name)};
  if (name == "prediction_time") return {ObjectiveKind::kPredictionTime, std::string(name)};
  if (name == "electricity") return {ObjectiveKind::kElectricity, std::string(name)};
  if (name == "emissions") return {ObjectiveKind::kEmissions, std::string(name)};
  if (name == "explainability") return {ObjectiveKind::kExplainability, std::string(name)};
  fail(ErrorKind::kInvalidArgument, "UNKNOWN_OBJECTIVE",
       "unknown objective '" + std::string(name) +
           "'; expected loss, log_loss, training_time, prediction_time, electricity, emissions or explainability");
}

std::string_view loss_metric_name(LossMetric m) noexcept {
  switch (m) {
    case LossMetric::kOneMinusF1: return "1-f1";
    case LossMetric::kLogLoss: return "log_loss";
    case LossMetric::kRmse: return "rmse";
  }
  return "1-f1";
}

LossMetric TrialConfig::loss_metric(models::Task t) const noexcept {
  if (t != models::Task::kClassification) return LossMetric::kRmse;
  for (const auto& o : objectives) {
    if (o.name == "log_loss") return LossMetric::kLogLoss;
  }
  return LossMetric::kOneMinusF1;
}

void validate(const TrialConfig& c) {
  if (c.objectives.empty() || c.objectives.size() > kMaxObjectives) {
    fail(ErrorKind::kUnprocessable, "OBJECTIVE_LIMIT",
         "a trial takes between 1 and 3 objectives (the loss counts as one); got " +
             std::to_string(c.objectives.size()));
  }
  std::set<ObjectiveKind> seen;
  for (const auto& o : c.objectives) {
    if (!seen.insert(o.kind).second) {
      fail(ErrorKind::kInvalidArgument, "DUPLICATE_OBJECTIVE", "objective '" + o.name + "' is listed more than once");
    }
  }
  const auto& s = c.split;
  if (!(s.train > 0 && s.validation > 0 && s.test > 0) || std::abs(s.train + s.validation + s.test - 1.0) > 1e-9) {
    fail(ErrorKind::kInvalidArgument, "INVALID_SPLIT", "split ratios must be positive and sum to 1");
  }
  if (c.population < 2 || c.population > 512) {
    fail(ErrorKind::kInvalidArgument, "INVALID_BUDGET", "population must lie in [2, 512]");
  }
  if (c.generations < 1 || c.generations > 200) {
    fail(ErrorKind::kInvalidArgument, "INVALID_BUDGET", "generations must lie in [1, 200]");
  }
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "INVALID_THRESHOLD", "threshold must lie in (0, 1)");
  }
  if (c.target.empty()) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "target is required");
  if (c.task && *c.task == models::Task::kForecasting && !c.datetime_index) {
    fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "forecasting needs a datetime_index column");
  }
  if (c.task) {
    for (auto f : c.families) {
      if (!models::supports(f, *c.task)) {
        fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG",
             std::string(models::family_name(f)) + " does not support " + std::string(models::task_name(*c.task)));
      }
    }
  }
}

namespace {

template <typename T>
T get_field(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

TrialConfig trial_config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "trial config must be a JSON object");
  static const std::set<std::string> known{"dataset_id", "target",   "task",       "datetime_index", "objectives",
                                           "include",    "families", "pipeline_search", "population", "generations",
                                           "split",      "seed",     "timing",     "threshold",      "workers"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "unknown field '" + key + "'");
  }
  TrialConfig c;
  c.dataset_id = get_field<std::string>(j, "dataset_id", "");
  if (c.dataset_id.empty()) fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", "dataset_id is required");
  c.target = get_field<std::string>(j, "target", "");
  if (j.contains("task") && !j["task"].is_null()) c.task = models::task_from_name(get_field<std::string>(j, "task", ""));
  if (j.contains("datetime_index") && !j["datetime_index"].is_null()) {
    c.datetime_index = get_field<std::string>(j, "datetime_index", "");
  }
  if (j.contains("objectives")) {
    c.objectives.clear();
    for (const auto& name : get_field<std::vector<std::string>>(j, "objectives", {})) {
      c.objectives.push_back(objective_from_name(name));
    }
  }
  c.include = get_field<std::vector<std::string>>(j, "include", {});
  for (const auto& name : get_field<std::vector<std::string>>(j, "families", {})) {
    c.families.push_back(models::family_from_name(name));
  }
  c.pipeline_search = search_toggles_from_json(j.value("pipeline_search", Json()));
  c.population = get_field<std::size_t>(j, "population", c.population);
  c.generations = get_field<std::size_t>(j, "generations", c.generations);
  if (j.contains("split")) {
    const auto& s = j.at("split");
    c.split.train = get_field<double>(s, "train", c.split.train);
    c.split.validation = get_field<double>(s, "validation", c.split.validation);
    c.split.test = get_field<double>(s, "test", c.split.test);
  }
  c.seed = get_field<std::uint64_t>(j, "seed", 0);
  c.timing = models::timing_mode_from_name(get_field<std::string>(j, "timing", "modelled"));
  c.threshold = get_field<double>(j, "threshold", 0.5);
  c.workers = get_field<std::size_t>(j, "workers", 0);
  validate(c);
  return c;
}

Json to_json(const TrialConfig& c) {
  Json objectives = Json::array();
  for (const auto& o : c.objectives) objectives.push_back(o.name);
  Json families = Json::array();
  for (auto f : c.families) families.push_back(models::family_name(f));
  return {{"dataset_id", c.dataset_id},
          {"target", c.target},
          {"task", c.task ? Json(models::task_name(*c.task)) : Json(nullptr)},
          {"datetime_index", c.datetime_index ? Json(*c.datetime_index) : Json(nullptr)},
          {"objectives", objectives},
          {"include", c.include},
          {"families", families},
          {"pipeline_search", to_json(c.pipeline_search)},
          {"population", c.population},
          {"generations", c.generations},
          {"split", {{"train", c.split.train}, {"validation", c.split.validation}, {"test", c.split.test}}},
          {"seed", c.seed},
          {"timing", models::timing_mode_name(c.timing)},
          {"threshold", c.threshold},
          {"workers", c.workers}};
}

models::Task infer_task(const data::Table& table, const std::string& target,
                        const std::optional<std::string>& datetime_index, std::optional<models::Task> requested) {
  using data::ColumnType;
  const auto& col = table.column(table.index_of(target));
  if (datetime_index) {
    const auto& idx = table.column(table.index_of(*datetime_index));
    if (idx.type != ColumnType::kDatetime && idx.type != ColumnType::kNumeric) {
      fail(ErrorKind::kUnprocessable, "INCOMPATIBLE_TASK", "datetime index '" + *datetime_index + "' is not a date column");
    }
  }
  const bool numeric = col.type == ColumnType::kNumeric;
  if (requested) {
    switch (*requested) {
      case models::Task::kClassification:
        if (col.type == ColumnType::kDatetime) {
          fail(ErrorKind::kUnprocessable, "INCOMPATIBLE_TASK", "a datetime column cannot be a classification target");
        }
        break;
      case models::Task::kRegression:
        if (!numeric) fail(ErrorKind::kUnprocessable, "INCOMPATIBLE_TASK", "regression needs a numeric target");
        break;
      case models::Task::kForecasting:
        if (!numeric || !datetime_index) {
          fail(ErrorKind::kUnprocessable, "INCOMPATIBLE_TASK", "forecasting needs a numeric target and a datetime index");
        }
        break;
    }
    return *requested;
  }
  switch (col.type) {
    case ColumnType::kBoolean:
    case ColumnType::kCategorical:
      return models::Task::kClassification;
    case ColumnType::kNumeric:
      return datetime_index ? models::Task::kForecasting : models::Task::kRegression;
    default:
      fail(ErrorKind::kUnprocessable, "TASK_OVERRIDE_REQUIRED",
           "target '" + target + "' is a " + std::string(data::type_name(col.type)) +
               " column with " + std::to_string(col.cardinality) +
               " distinct values; set the task explicitly (e.g. \"task\": \"classification\")");
  }
}

}  // namespace deskml::trial
