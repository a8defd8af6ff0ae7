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

#include "deskml/data/profile.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace deskml::data {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

Histogram equal_width_histogram(const std::vector<double>& values, int bins) {
  Histogram h;
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn, hi = *mx;
  if (lo == hi) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const double width = (hi - lo) / bins;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

namespace {

CategoricalProfile frequencies(const Column& col) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t r = 0; r < col.size(); ++r) {
    if (!col.is_missing(r)) ++counts[col.cells[r]];
  }
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  CategoricalProfile p;
  if (!items.empty()) p.mode = items.front().first;
  if (items.size() > kTopFrequencies) items.resize(kTopFrequencies);
  p.frequencies = std::move(items);
  return p;
}

NumericProfile numeric_profile(const std::vector<double>& values) {
  NumericProfile p;
  if (values.empty()) return p;
  double sum = 0.0;
  for (double v : values) sum += v;
  p.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - p.mean) * (v - p.mean);
  p.std = std::sqrt(ss / static_cast<double>(values.size()));
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  p.min = sorted.front();
  p.max = sorted.back();
  p.q1 = quantile_sorted(sorted, 0.25);
  p.median = quantile_sorted(sorted, 0.5);
  p.q3 = quantile_sorted(sorted, 0.75);
  p.histogram = equal_width_histogram(values);
  return p;
}

}  // namespace

ColumnProfile profile_column(const Column& col) {
  ColumnProfile p;
  p.name = col.name;
  p.type = col.type;
  p.count = col.size() - col.missing_count;
  p.missing_ratio = col.size() == 0 ? 0.0 : static_cast<double>(col.missing_count) / static_cast<double>(col.size());

  switch (col.type) {
    case ColumnType::kNumeric: {
      std::vector<double> present;
      present.reserve(p.count);
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (!col.is_missing(r)) present.push_back(col.values[r]);
      }
      p.numeric = numeric_profile(present);
      break;
    }
    case ColumnType::kDatetime: {
      std::size_t lo = col.size(), hi = col.size();
      for (std::size_t r = 0; r < col.size(); ++r) {
        if (col.is_missing(r)) continue;
        if (lo == col.size() || col.values[r] < col.values[lo]) lo = r;
        if (hi == col.size() || col.values[r] > col.values[hi]) hi = r;
      }
      if (lo != col.size()) p.datetime_range = std::make_pair(col.cells[lo], col.cells[hi]);
      break;
    }
    case ColumnType::kCategorical:
    case ColumnType::kBoolean:
    case ColumnType::kText:
      p.categorical = frequencies(col);
      break;
  }
  return p;
}

std::vector<ColumnProfile> profile(const Table& table) {
  std::vector<ColumnProfile> out;
  out.reserve(table.column_count());
  for (const auto& c : table.columns()) out.push_back(profile_column(c));
  return out;
}

Json profile_json(const ColumnProfile& p) {
  Json j{{"name", p.name},
         {"type", std::string(type_name(p.type))},
         {"count", p.count},
         {"missing_ratio", p.missing_ratio}};
  if (p.numeric) {
    const auto& n = *p.numeric;
    Json edges = Json::array();
    for (double e : n.histogram.edges) edges.push_back(number_to_json(e));
    j["numeric"] = Json{{"mean", number_to_json(n.mean)},
                        {"std", number_to_json(n.std)},
                        {"min", number_to_json(n.min)},
                        {"max", number_to_json(n.max)},
                        {"quartiles", {number_to_json(n.q1), number_to_json(n.median), number_to_json(n.q3)}},
                        {"histogram", {{"edges", edges}, {"counts", n.histogram.counts}}}};
  }
  if (p.categorical) {
    Json freq = Json::array();
    for (const auto& [value, count] : p.categorical->frequencies) freq.push_back({{"value", value}, {"count", count}});
    j["categorical"] = Json{{"mode", p.categorical->mode}, {"frequencies", freq}};
  }
  if (p.datetime_range) j["datetime"] = Json{{"min", p.datetime_range->first}, {"max", p.datetime_range->second}};
  return j;
}

Json profiles_json(const std::vector<ColumnProfile>& ps) {
  Json arr = Json::array();
  for (const auto& p : ps) arr.push_back(profile_json(p));
  return arr;
}

}  // namespace deskml::data
