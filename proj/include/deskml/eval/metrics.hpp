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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/matrix.hpp"
#include "deskml/models/family.hpp"

namespace deskml::eval {

inline constexpr double kProbabilityClip = 1e-15;
inline constexpr std::size_t kDensityBins = 20;

enum class Split { kTrain, kValidation, kTest };

std::string_view split_name(Split s) noexcept;

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]
  std::size_t total() const noexcept;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score >= threshold predicts positive; +inf for the origin
};

struct PrPoint {
  double recall = 0.0;
  double precision = 1.0;
  double threshold = 0.0;
};

/// One-vs-rest curves for a single class (the positive class when binary).
struct ClassCurves {
  std::string label;
  std::vector<RocPoint> roc;
  std::optional<double> auc;  // undefined when the class or its complement is absent
  std::vector<PrPoint> pr;
};

/// Binary only: histogram of predicted positive-class probability per true class.
struct Density {
  std::vector<double> edges;                     // kDensityBins + 1 over [0, 1]
  std::vector<std::vector<std::size_t>> counts;  // [true class][bin]
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // positive class when binary, macro otherwise
  double recall = 0.0;
  double f1 = 0.0;
  double log_loss = 0.0;
  double threshold = 0.5;
  ConfusionMatrix confusion;
  std::vector<ClassCurves> curves;
  std::optional<Density> density;
};

struct RegressionMetrics {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;  // undefined for constant y_true
};

struct EvalReport {
  Split split = Split::kValidation;
  models::Task task = models::Task::kClassification;
  std::size_t rows = 0;
  std::optional<ClassificationMetrics> classification;
  std::optional<RegressionMetrics> regression;
};

Json to_json(const EvalReport& r);

/// y_true holds class codes indexing the probability columns (labels).
/// Binary: positive class is column 1, predicted positive when p1 > threshold.
/// Multiclass: argmax (ties to the lower index), macro-averaged precision,
/// recall and f1 over the classes present in y_true or the predictions.
/// Errors: "LENGTH_MISMATCH", "UNKNOWN_CLASS", "INVALID_THRESHOLD".
EvalReport classification_report(std::span<const double> y_true, const Matrix& probabilities,
                                 std::span<const std::string> labels, double threshold = 0.5,
                                 Split split = Split::kValidation);

/// Errors: "LENGTH_MISMATCH" (including empty input).
EvalReport regression_report(std::span<const double> y_true, std::span<const double> y_pred,
                             Split split = Split::kValidation, models::Task task = models::Task::kRegression);

/// ROC points over every distinct score, from (0, 0) at +inf.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const std::uint8_t> positive);
/// PR points over every distinct score, from (recall 0, precision 1).
std::vector<PrPoint> pr_points(std::span<const double> scores, std::span<const std::uint8_t> positive);
/// Trapezoidal area over (fpr, tpr). Errors: "TOO_FEW_POINTS" below 2 points.
double roc_auc(std::span<const RocPoint> points);

}  // namespace deskml::eval
