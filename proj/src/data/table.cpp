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

#include "deskml/data/table.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include "deskml/common/error.hpp"
#include "deskml/common/strings.hpp"

namespace deskml::data {

namespace {

constexpr double kTypeShare = 0.95;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const long long yoe = y - era * 400;
  const long long doy = (153LL * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const long long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

std::optional<double> parse_time_suffix(std::string_view rest) {
  if (rest.empty()) return 0.0;
  if (rest.front() != ' ' && rest.front() != 'T') return std::nullopt;
  rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
  int hh = 0, mm = 0, ss = 0;
  if (!read_int(rest, 0, 2, hh) || rest.size() < 5 || rest[2] != ':' || !read_int(rest, 3, 2, mm)) return std::nullopt;
  if (rest.size() == 8) {
    if (rest[5] != ':' || !read_int(rest, 6, 2, ss)) return std::nullopt;
  } else if (rest.size() != 5) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return (hh * 3600.0 + mm * 60.0 + ss) / 86400.0;
}

}  // namespace

std::string_view type_name(ColumnType t) noexcept {
  switch (t) {
    case ColumnType::kNumeric: return "numeric";
    case ColumnType::kCategorical: return "categorical";
    case ColumnType::kBoolean: return "boolean";
    case ColumnType::kDatetime: return "datetime";
    case ColumnType::kText: return "text";
  }
  return "text";
}

ColumnType type_from_name(std::string_view name) {
  for (auto t : {ColumnType::kNumeric, ColumnType::kCategorical, ColumnType::kBoolean, ColumnType::kDatetime,
                 ColumnType::kText}) {
    if (type_name(t) == name) return t;
  }
  fail(ErrorKind::kInvalidArgument, "UNKNOWN_COLUMN_TYPE", "unknown column type '" + std::string(name) + "'");
}

bool is_missing_marker(std::string_view cell) noexcept {
  cell = trim(cell);
  return cell.empty() || iequals(cell, "na") || iequals(cell, "n/a") || iequals(cell, "null");
}

std::optional<double> boolean_value(std::string_view cell) noexcept {
  cell = trim(cell);
  if (iequals(cell, "yes") || iequals(cell, "true") || cell == "1") return 1.0;
  if (iequals(cell, "no") || iequals(cell, "false") || cell == "0") return 0.0;
  return std::nullopt;
}

std::optional<double> parse_datetime(std::string_view s) noexcept {
  s = trim(s);
  int y = 0, m = 0, d = 0;
  std::string_view rest;
  if (s.size() >= 10 && (s[4] == '-' || s[4] == '/') && s[7] == s[4]) {
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
    rest = s.substr(10);
  } else if (s.size() >= 10 && s[2] == '/' && s[5] == '/') {
    if (!read_int(s, 0, 2, m) || !read_int(s, 3, 2, d) || !read_int(s, 6, 4, y)) return std::nullopt;
    rest = s.substr(10);
  } else {
    return std::nullopt;
  }
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  auto frac = parse_time_suffix(rest);
  if (!frac) return std::nullopt;
  return static_cast<double>(days_from_civil(y, m, d)) + *frac;
}

DateParts date_parts(double days_since_epoch) noexcept {
  long long z = static_cast<long long>(std::floor(days_since_epoch));
  DateParts p;
  p.weekday = static_cast<int>(((z % 7) + 7 + 3) % 7);  // 1970-01-01 was a Thursday
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const long long doe = z - era * 146097;
  const long long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long long mp = (5 * doy + 2) / 153;
  p.day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  p.month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  p.year = static_cast<int>(yoe + era * 400 + (p.month <= 2));
  return p;
}

ColumnType infer_type(std::span<const std::string> cells) {
  std::unordered_set<std::string> distinct;
  std::size_t present = 0, numeric = 0, dates = 0;
  for (const auto& c : cells) {
    if (is_missing_marker(c)) continue;
    ++present;
    distinct.insert(c);
    if (parse_number(c)) ++numeric;
    if (parse_datetime(c)) ++dates;
  }
  if (present == 0) return ColumnType::kNumeric;

  if (distinct.size() <= 2) {
    static constexpr std::array<std::array<std::string_view, 2>, 3> kPairs{
        {{"yes", "no"}, {"true", "false"}, {"1", "0"}}};
    for (const auto& pair : kPairs) {
      bool all = true;
      for (const auto& v : distinct) all = all && (iequals(v, pair[0]) || iequals(v, pair[1]));
      if (all) return ColumnType::kBoolean;
    }
  }
  const double n = static_cast<double>(present);
  if (static_cast<double>(numeric) >= kTypeShare * n) return ColumnType::kNumeric;
  if (static_cast<double>(dates) >= kTypeShare * n) return ColumnType::kDatetime;
  const double cap = std::max(50.0, 0.05 * static_cast<double>(cells.size()));
  if (static_cast<double>(distinct.size()) <= cap) return ColumnType::kCategorical;
  return ColumnType::kText;
}

Column make_column(std::string name, std::vector<std::string> cells) {
  const ColumnType t = infer_type(cells);
  return make_column(std::move(name), std::move(cells), t);
}

Column make_column(std::string name, std::vector<std::string> cells, ColumnType type) {
  Column col;
  col.name = std::move(name);
  col.type = type;
  col.cells = std::move(cells);
  const std::size_t n = col.cells.size();
  col.missing.assign(n, 0);
  const bool has_values =
      type == ColumnType::kNumeric || type == ColumnType::kDatetime || type == ColumnType::kBoolean;
  if (has_values) col.values.assign(n, std::numeric_limits<double>::quiet_NaN());

  std::unordered_set<std::string_view> distinct;
  for (std::size_t r = 0; r < n; ++r) {
    const std::string& c = col.cells[r];
    bool missing = is_missing_marker(c);
    if (!missing && has_values) {
      std::optional<double> v;
      switch (type) {
        case ColumnType::kNumeric: v = parse_number(c); break;
        case ColumnType::kDatetime: v = parse_datetime(c); break;
        case ColumnType::kBoolean: v = boolean_value(c); break;
        default: break;
      }
      // Cells that do not parse under the inferred type count as missing.
      if (v) col.values[r] = *v;
      else missing = true;
    }
    if (missing) {
      col.missing[r] = 1;
      ++col.missing_count;
    } else {
      distinct.insert(c);
    }
  }
  col.cardinality = distinct.size();
  return col;
}

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (const auto& c : columns_) {
    if (c.size() != rows_) {
      fail(ErrorKind::kInvalidArgument, "RAGGED_TABLE", "column '" + c.name + "' has " + std::to_string(c.size()) +
                                                            " rows, expected " + std::to_string(rows_));
    }
  }
}

const Column* Table::find(std::string_view name) const noexcept {
  for (const auto& c : columns_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::size_t Table::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  fail(ErrorKind::kNotFound, "UNKNOWN_COLUMN", "no column named '" + std::string(name) + "'");
}

std::vector<std::string> Table::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

}  // namespace deskml::data
