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

// Per-family training routines behind models::fit.

#include <cstdint>

#include "deskml/models/model.hpp"

namespace deskml::models::detail {

struct FitInput {
  const Matrix& x;
  const TargetValues& y;
  const Json& hp;
  std::uint64_t seed;
  std::uint64_t ops = 0;
};

LinearParams fit_linear_regression(FitInput& in);
LinearParams fit_ridge(FitInput& in);
LinearParams fit_logistic(FitInput& in);
NaiveBayesParams fit_gaussian_nb(FitInput& in);
KnnParams fit_knn(FitInput& in);
EnsembleParams fit_decision_tree(FitInput& in);
EnsembleParams fit_random_forest(FitInput& in);
EnsembleParams fit_gradient_boosting(FitInput& in);
ForecasterParams fit_forecaster(Family family, const Json& hp, std::span<const double> series);

/// Writes one output row (probabilities or the single value). Returns the
/// modelled op count for the row.
std::uint64_t predict_row(const ModelParams& params, std::size_t outputs, std::span<const double> row,
                          std::span<double> out, std::vector<double>& scratch);

std::uint64_t predict_local(const ModelParams& params, std::size_t outputs, std::span<const double> row,
                            std::span<double> out, std::vector<double>& scratch);

std::vector<double> forecast_from(Family family, const Json& hp, const ForecasterParams& state, int horizon);

}  // namespace deskml::models::detail
