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
#include <string_view>
#include <vector>

namespace deskml::data {

enum class ColumnType { kNumeric, kCategorical, kBoolean, kDatetime, kText };

std::string_view type_name(ColumnType t) noexcept;
ColumnType type_from_name(std::string_view name);

/// Empty/whitespace, "NA", "N/A" and "null" (any case) are missing.
bool is_missing_marker(std::string_view cell) noexcept;

/// yes/true/1 -> 1, no/false/0 -> 0, anything else -> nullopt. Case-insensitive.
std::optional<double> boolean_value(std::string_view cell) noexcept;

/// Days since 1970-01-01 (fraction = time of day) for the accepted formats:
/// YYYY-MM-DD, YYYY/MM/DD, MM/DD/YYYY, each optionally followed by
/// [ T]HH:MM[:SS] and a trailing Z.
std::optional<double> parse_datetime(std::string_view cell) noexcept;

struct DateParts {
  int year = 1970;
  int month = 1;
  int day = 1;
  int weekday = 3;  // 0 = Monday
};
DateParts date_parts(double days_since_epoch) noexcept;

struct Column {
  std::string name;
  ColumnType type = ColumnType::kCategorical;
  std::vector<std::string> cells;      // raw text, trimmed
  std::vector<std::uint8_t> missing;   // 1 = missing under the inferred type
  std::vector<double> values;          // numeric/datetime/boolean; NaN when missing
  std::size_t missing_count = 0;
  std::size_t cardinality = 0;         // distinct non-missing cells

  std::size_t size() const noexcept { return cells.size(); }
  bool is_missing(std::size_t row) const noexcept { return missing[row] != 0; }
  bool has_values() const noexcept { return !values.empty(); }
};

/// Type inference rules, applied in order:
///   boolean     cardinality <= 2 and every value belongs to one of the pairs
///               yes/no, true/false, 0/1 (case-insensitive)
///   numeric     >= 95% of non-missing cells parse as numbers
///   datetime    >= 95% of non-missing cells parse as dates
///   categorical cardinality <= max(50, 5% of rows)
///   text        otherwise
///   A column with no present cells is numeric.
ColumnType infer_type(std::span<const std::string> cells);

Column make_column(std::string name, std::vector<std::string> cells);
Column make_column(std::string name, std::vector<std::string> cells, ColumnType type);

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  std::size_t row_count() const noexcept { return rows_; }
  std::size_t column_count() const noexcept { return columns_.size(); }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  const std::vector<Column>& columns() const noexcept { return columns_; }

  const Column* find(std::string_view name) const noexcept;
  /// Throws Error(kNotFound, "UNKNOWN_COLUMN").
  std::size_t index_of(std::string_view name) const;
  std::vector<std::string> column_names() const;

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

}  // namespace deskml::data
