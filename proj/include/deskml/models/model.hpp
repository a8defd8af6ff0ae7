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

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/matrix.hpp"
#include "deskml/models/family.hpp"
#include "deskml/models/hyperparams.hpp"
#include "deskml/models/tree.hpp"

namespace deskml::models {

/// How fit/predict timings are obtained. kModelled converts deterministic
/// operation counts at a nominal 1e9 ops/s, so timing objectives and the
/// serialised model are reproducible; kMeasured uses the monotonic clock.
enum class TimingMode { kModelled, kMeasured };

inline constexpr double kNominalOpsPerSecond = 1e9;

std::string_view timing_mode_name(TimingMode m) noexcept;
TimingMode timing_mode_from_name(std::string_view s);

struct ResourceLog {
  TimingMode timing = TimingMode::kModelled;
  double fit_seconds = 0.0;
  double predict_seconds_per_1000 = 0.0;
  std::uint64_t fit_ops = 0;
  double predict_ops_per_row = 0.0;
};

/// Maps predictor scores to outputs.
enum class OutputTransform {
  kIdentity,    // regression value, or probabilities already normalised
  kSigmoid,     // one score -> [1 - p, p]
  kSoftmax,     // one score per class
  kOvrSigmoid,  // one score per class, sigmoids renormalised to sum 1
};

std::string_view output_transform_name(OutputTransform t) noexcept;

/// scores: one row of raw outputs. Writes the probability row (or the value).
void apply_output_transform(OutputTransform t, std::span<const double> scores, std::span<double> out) noexcept;

struct LinearParams {
  Matrix weights;  // outputs x features
  std::vector<double> bias;
  OutputTransform transform = OutputTransform::kIdentity;
};

struct NaiveBayesParams {
  Matrix means;      // classes x features
  Matrix variances;  // smoothed
  std::vector<double> log_priors;  // -inf for classes absent from training
};

struct KnnParams {
  Matrix x;
  std::vector<double> y;  // class codes or values
  int k = 5;
  bool distance_weighted = false;
};

enum class Combiner { kMean, kSumShrinkage };

std::string_view combiner_name(Combiner c) noexcept;

/// Trees grouped by output. kMean: a single group whose leaves hold full
/// output vectors, averaged. kSumShrinkage: one group per output score, score
/// = base + learning_rate * sum of scalar leaves.
struct EnsembleParams {
  Combiner combiner = Combiner::kMean;
  double learning_rate = 1.0;
  std::vector<double> base;
  std::vector<std::vector<TreePtr>> groups;
  OutputTransform transform = OutputTransform::kIdentity;
};

struct ForecasterParams {
  std::vector<double> history_tail;  // last season_length values
  double first = 0.0;
  double last = 0.0;
  double level = 0.0;
  std::size_t count = 0;
};

using ModelParams = std::variant<LinearParams, NaiveBayesParams, KnnParams, EnsembleParams, ForecasterParams>;

/// Target as handed to a learner. Classification targets are class codes into
/// `classes`; regression/forecasting targets are reals in row/time order.
struct TargetValues {
  Task task = Task::kRegression;
  std::vector<double> values;
  std::vector<std::string> classes;
};

struct FitOptions {
  std::uint64_t seed = 0;
  TimingMode timing = TimingMode::kModelled;
};

struct TrainedModel {
  Family family = Family::kLinearRegression;
  Task task = Task::kRegression;
  Json hyperparams = Json::object();
  std::vector<std::string> feature_names;
  std::vector<std::string> classes;
  bool degenerate = false;  // single-class training target
  ResourceLog resources;
  ModelParams params;

  bool is_classifier() const noexcept { return task == Task::kClassification; }
};

struct Predictions {
  std::vector<double> values;  // class code (argmax, ties to lower index) or real
  Matrix probabilities;        // rows x classes; empty for regression
};

/// Errors: kInvalidArgument "INVALID_TRAINING_DATA" for empty/mismatched or
/// non-finite inputs, "UNSUPPORTED_TASK" when the family cannot serve the task,
/// plus hyperparameter validation errors.
TrainedModel fit(Family family, const Json& hyperparams, const Matrix& x, std::vector<std::string> feature_names,
                 const TargetValues& y, const FitOptions& options = {});

/// Columns are matched by name against the model's features.
/// Errors: kInvalidArgument "FEATURE_MISMATCH" listing missing/extra columns.
Predictions predict(const TrainedModel& model, const Matrix& x, std::span<const std::string> columns);

/// Unchecked variant for matrices already in the model's feature order.
Predictions predict(const TrainedModel& model, const Matrix& x);

/// Forecast from the state captured at fit time, or from an explicit history.
/// Errors: "INVALID_HORIZON" for horizon <= 0, "HISTORY_TOO_SHORT".
std::vector<double> forecast(const TrainedModel& model, int horizon);
std::vector<double> forecast(const TrainedModel& model, std::span<const double> history, int horizon);

std::size_t parameter_count(const TrainedModel& model);
double explainability(const TrainedModel& model);

Json to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const Json& j);

/// Mean log-loss plus (l2 / 2)·||w||² for the logistic model on the given
/// rows, with its gradient. Parameter layout: per output score, the feature
/// weights followed by the bias; one score when classes == 2, else one per
/// class (softmax).
struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossAndGradient logistic_loss_and_gradient(const Matrix& x, std::span<const double> y, std::size_t classes,
                                           std::span<const double> params, double l2);

}  // namespace deskml::models
