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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/data/table.hpp"

namespace deskml::data {

enum class CorrelationMethod { kPearson, kCramersV, kCorrelationRatio };

std::string_view method_name(CorrelationMethod m) noexcept;

/// Pearson r over the given pairs. nullopt when either side is constant or
/// fewer than two pairs are present.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Bias-uncorrected Cramér's V from category codes. nullopt when either
/// variable has a single level.
std::optional<double> cramers_v(std::span<const int> a, std::span<const int> b);

/// Correlation ratio eta = sqrt(SS_between / SS_total) of values grouped by
/// category code. nullopt when the values are constant.
std::optional<double> correlation_ratio(std::span<const double> values, std::span<const int> groups);

struct CorrelationEntry {
  CorrelationMethod method = CorrelationMethod::kPearson;
  std::optional<double> value;  // nullopt = undefined (constant column etc.)
};

/// Symmetric matrix over the numeric, boolean and categorical columns.
/// Each unordered pair is stored once, so value(a, b) == value(b, a) exactly.
class CorrelationMatrix {
 public:
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::size_t pair_count() const noexcept { return entries_.size(); }

  /// Throws Error(kNotFound) when the pair is not part of the matrix.
  const CorrelationEntry& at(const std::string& a, const std::string& b) const;
  std::optional<double> value(const std::string& a, const std::string& b) const { return at(a, b).value; }

  Json to_json() const;

 private:
  friend CorrelationMatrix correlations(const Table& table);
  std::vector<std::string> columns_;
  std::map<std::pair<std::string, std::string>, CorrelationEntry> entries_;
  std::vector<std::string> warnings_;
};

CorrelationMatrix correlations(const Table& table);

}  // namespace deskml::data
