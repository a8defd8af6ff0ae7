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
#include <utility>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/data/table.hpp"

namespace deskml::data {

inline constexpr int kHistogramBins = 20;
inline constexpr std::size_t kTopFrequencies = 50;

struct Histogram {
  std::vector<double> edges;         // bins + 1 edges; {v, v} for a constant column
  std::vector<std::size_t> counts;   // sums to the non-missing count
};

struct NumericProfile {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  Histogram histogram;
};

struct CategoricalProfile {
  std::vector<std::pair<std::string, std::size_t>> frequencies;  // count desc, value asc; top 50
  std::string mode;
};

struct ColumnProfile {
  std::string name;
  ColumnType type = ColumnType::kCategorical;
  std::size_t count = 0;       // non-missing cells
  double missing_ratio = 0.0;
  std::optional<NumericProfile> numeric;
  std::optional<CategoricalProfile> categorical;
  std::optional<std::pair<std::string, std::string>> datetime_range;  // raw min/max cells
};

/// Quantile by linear interpolation between closest ranks (sorted input).
double quantile_sorted(const std::vector<double>& sorted, double q);

/// 20 equal-width bins on [min, max]; the last bin is closed. A constant input
/// collapses to a single bin.
Histogram equal_width_histogram(const std::vector<double>& values, int bins = kHistogramBins);

ColumnProfile profile_column(const Column& col);
std::vector<ColumnProfile> profile(const Table& table);

Json profile_json(const ColumnProfile& p);
Json profiles_json(const std::vector<ColumnProfile>& ps);

}  // namespace deskml::data
