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

#include "deskml/features/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deskml/common/error.hpp"
#include "deskml/data/correlation.hpp"

namespace deskml::features {

std::string_view selection_name(Selection s) noexcept {
  switch (s) {
    case Selection::kNone: return "none";
    case Selection::kTopCorrelation: return "top_correlation";
    case Selection::kTopMutualInfo: return "top_mutual_info";
  }
  return "none";
}

Selection selection_from_name(std::string_view name) {
  for (auto s : {Selection::kNone, Selection::kTopCorrelation, Selection::kTopMutualInfo}) {
    if (selection_name(s) == name) return s;
  }
  fail(ErrorKind::kInvalidArgument, "INVALID_SELECTION", "unknown selection method '" + std::string(name) + "'");
}

namespace {

std::vector<int> codes_of(std::span<const double> v) {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<int>(std::lround(v[i]));
  return out;
}

}  // namespace

double association_score(std::span<const double> x, const SelectionTarget& target) {
  std::optional<double> s;
  if (target.categorical) {
    const auto groups = codes_of(target.values);
    s = data::correlation_ratio(x, groups);
  } else {
    s = data::pearson(x, target.values);
  }
  return s ? std::abs(*s) : 0.0;
}

std::vector<int> equal_frequency_bins(std::span<const double> x, int bins) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  const std::size_t n = sorted.size();
  for (int i = 1; i < bins && n > 0; ++i) {
    const double c = sorted[static_cast<std::size_t>(i) * n / static_cast<std::size_t>(bins)];
    if (cuts.empty() || cuts.back() != c) cuts.push_back(c);
  }
  std::vector<int> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), x[i]) - cuts.begin());
  }
  return out;
}

double mutual_information(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < n; ++i) {
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
    pab[{a[i], b[i]}] += 1.0;
  }
  const double total = static_cast<double>(n);
  double mi = 0.0;
  for (const auto& [key, count] : pab) {
    const double pxy = count / total;
    mi += pxy * std::log(pxy / ((pa[key.first] / total) * (pb[key.second] / total)));
  }
  return std::max(0.0, mi);
}

double mutual_information_score(std::span<const double> x, const SelectionTarget& target) {
  const auto xb = equal_frequency_bins(x);
  const auto yb = target.categorical ? codes_of(target.values) : equal_frequency_bins(target.values);
  return mutual_information(xb, yb);
}

std::vector<std::string> select_features(std::span<const CandidateFeature> candidates, const SelectionTarget& target,
                                         Selection method, std::size_t k, std::vector<std::string>* warnings) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "INVALID_K", "k must be >= 1");
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    double s = 0.0;
    switch (method) {
      case Selection::kNone: break;
      case Selection::kTopCorrelation: s = association_score(c.values, target); break;
      case Selection::kTopMutualInfo: s = mutual_information_score(c.values, target); break;
    }
    scored.emplace_back(s, c.name);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (k > scored.size()) {
    if (warnings) {
      warnings->push_back("requested " + std::to_string(k) + " features but only " + std::to_string(scored.size()) +
                          " are available; keeping all");
    }
    k = scored.size();
  }
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace deskml::features
