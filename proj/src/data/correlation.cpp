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

#include "deskml/data/correlation.hpp"

#include <cmath>
#include <map>

#include "deskml/common/error.hpp"

namespace deskml::data {

std::string_view method_name(CorrelationMethod m) noexcept {
  switch (m) {
    case CorrelationMethod::kPearson: return "pearson";
    case CorrelationMethod::kCramersV: return "cramers_v";
    case CorrelationMethod::kCorrelationRatio: return "correlation_ratio";
  }
  return "pearson";
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  // Single pass with running co-moments.
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    ++n;
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    mx += dx / static_cast<double>(n);
    my += dy / static_cast<double>(n);
    sxx += dx * (x[i] - mx);
    syy += dy * (y[i] - my);
    sxy += dx * (y[i] - my);
  }
  if (n < 2 || sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::optional<double> cramers_v(std::span<const int> a, std::span<const int> b) {
  std::map<int, double> ra, cb;
  std::map<std::pair<int, int>, double> joint;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    ra[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  const std::size_t k = std::min(ra.size(), cb.size());
  if (n == 0 || k < 2) return std::nullopt;
  double chi2 = 0.0;
  const double total = static_cast<double>(n);
  for (const auto& [ka, na] : ra) {
    for (const auto& [kb, nb] : cb) {
      const double expected = na * nb / total;
      auto it = joint.find({ka, kb});
      const double observed = it == joint.end() ? 0.0 : it->second;
      chi2 += (observed - expected) * (observed - expected) / expected;
    }
  }
  const double v = std::sqrt(chi2 / (total * static_cast<double>(k - 1)));
  return std::clamp(v, 0.0, 1.0);
}

std::optional<double> correlation_ratio(std::span<const double> values, std::span<const int> groups) {
  const std::size_t n = std::min(values.size(), groups.size());
  if (n == 0) return std::nullopt;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += values[i];
  mean /= static_cast<double>(n);
  std::map<int, std::pair<double, double>> sums;  // group -> (sum, count)
  double ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sums[groups[i]];
    s.first += values[i];
    s.second += 1.0;
    ss_total += (values[i] - mean) * (values[i] - mean);
  }
  if (ss_total <= 0.0 || sums.size() < 2) return std::nullopt;
  double ss_between = 0.0;
  for (const auto& [g, s] : sums) {
    const double gm = s.first / s.second;
    ss_between += s.second * (gm - mean) * (gm - mean);
  }
  return std::clamp(std::sqrt(ss_between / ss_total), 0.0, 1.0);
}

const CorrelationEntry& CorrelationMatrix::at(const std::string& a, const std::string& b) const {
  auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    fail(ErrorKind::kNotFound, "UNKNOWN_PAIR", "no correlation for ('" + a + "', '" + b + "')");
  }
  return it->second;
}

Json CorrelationMatrix::to_json() const {
  Json matrix = Json::array();
  Json methods = Json::array();
  for (const auto& a : columns_) {
    Json row = Json::array(), mrow = Json::array();
    for (const auto& b : columns_) {
      const auto& e = at(a, b);
      row.push_back(optional_to_json(e.value));
      mrow.push_back(std::string(method_name(e.method)));
    }
    matrix.push_back(std::move(row));
    methods.push_back(std::move(mrow));
  }
  return Json{{"columns", columns_}, {"matrix", matrix}, {"methods", methods}, {"warnings", warnings_}};
}

namespace {

struct Prepared {
  const Column* col;
  bool numeric;  // numeric path (Pearson / eta); otherwise categorical codes
  std::vector<int> codes;
  bool constant;
};

Prepared prepare(const Column& c) {
  Prepared p{&c, c.type == ColumnType::kNumeric, {}, true};
  if (p.numeric) {
    double first = std::nan("");
    for (std::size_t r = 0; r < c.size(); ++r) {
      if (c.is_missing(r)) continue;
      if (std::isnan(first)) first = c.values[r];
      else if (c.values[r] != first) p.constant = false;
    }
    return p;
  }
  std::map<std::string, int> vocab;
  for (std::size_t r = 0; r < c.size(); ++r) {
    if (!c.is_missing(r)) vocab.emplace(c.cells[r], 0);
  }
  int next = 0;
  for (auto& [k, v] : vocab) v = next++;
  p.codes.assign(c.size(), -1);
  for (std::size_t r = 0; r < c.size(); ++r) {
    if (!c.is_missing(r)) p.codes[r] = vocab.at(c.cells[r]);
  }
  p.constant = vocab.size() < 2;
  return p;
}

CorrelationEntry pair_entry(const Prepared& a, const Prepared& b) {
  const std::size_t n = a.col->size();
  auto present = [&](std::size_t r) { return !a.col->is_missing(r) && !b.col->is_missing(r); };
  if (a.numeric && b.numeric) {
    std::vector<double> x, y;
    for (std::size_t r = 0; r < n; ++r) {
      if (present(r)) {
        x.push_back(a.col->values[r]);
        y.push_back(b.col->values[r]);
      }
    }
    return {CorrelationMethod::kPearson, pearson(x, y)};
  }
  if (!a.numeric && !b.numeric) {
    std::vector<int> x, y;
    for (std::size_t r = 0; r < n; ++r) {
      if (present(r)) {
        x.push_back(a.codes[r]);
        y.push_back(b.codes[r]);
      }
    }
    return {CorrelationMethod::kCramersV, cramers_v(x, y)};
  }
  const Prepared& num = a.numeric ? a : b;
  const Prepared& cat = a.numeric ? b : a;
  std::vector<double> v;
  std::vector<int> g;
  for (std::size_t r = 0; r < n; ++r) {
    if (present(r)) {
      v.push_back(num.col->values[r]);
      g.push_back(cat.codes[r]);
    }
  }
  return {CorrelationMethod::kCorrelationRatio, correlation_ratio(v, g)};
}

}  // namespace

CorrelationMatrix correlations(const Table& table) {
  if (table.column_count() < 2) {
    fail(ErrorKind::kUnprocessable, "TOO_FEW_COLUMNS", "correlations need at least two columns");
  }
  std::vector<Prepared> eligible;
  for (const auto& c : table.columns()) {
    if (c.type == ColumnType::kNumeric || c.type == ColumnType::kBoolean || c.type == ColumnType::kCategorical) {
      eligible.push_back(prepare(c));
    }
  }
  CorrelationMatrix m;
  bool any_varying = false;
  for (const auto& p : eligible) any_varying = any_varying || !p.constant;
  if (!any_varying) {
    m.warnings_.push_back("no non-constant numeric or categorical columns; correlation matrix is empty");
    return m;
  }
  for (const auto& p : eligible) {
    m.columns_.push_back(p.col->name);
    if (p.constant) m.warnings_.push_back("column '" + p.col->name + "' is constant; its correlations are undefined");
  }
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    const auto& a = eligible[i];
    CorrelationEntry diag{a.numeric ? CorrelationMethod::kPearson : CorrelationMethod::kCramersV,
                          a.constant ? std::nullopt : std::optional<double>(1.0)};
    m.entries_[{a.col->name, a.col->name}] = diag;
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      const auto& b = eligible[j];
      const auto key = a.col->name <= b.col->name ? std::make_pair(a.col->name, b.col->name)
                                                  : std::make_pair(b.col->name, a.col->name);
      m.entries_[key] = pair_entry(a, b);
    }
  }
  return m;
}

}  // namespace deskml::data
