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

#include <span>
#include <string>
#include <vector>

namespace deskml::features {

enum class Selection { kNone, kTopCorrelation, kTopMutualInfo };

std::string_view selection_name(Selection s) noexcept;
Selection selection_from_name(std::string_view name);

struct CandidateFeature {
  std::string name;
  std::vector<double> values;
};

/// Target as seen by the scorers: class codes for classification, reals otherwise.
struct SelectionTarget {
  std::vector<double> values;
  bool categorical = false;
};

/// |Pearson r| for a real target, correlation ratio eta for a categorical one.
/// Constant inputs score 0.
double association_score(std::span<const double> x, const SelectionTarget& target);

/// Equal-frequency discretisation: the 9 inner decile cut points of the sorted
/// values, de-duplicated; a value's bin is the number of cut points below it.
/// Equal values always share a bin.
std::vector<int> equal_frequency_bins(std::span<const double> x, int bins = 10);

/// Plug-in mutual information (nats) between two discrete codings.
double mutual_information(std::span<const int> a, std::span<const int> b);

/// MI between a feature discretised into 10 equal-frequency bins and the
/// target (class codes, or 10 equal-frequency bins for a real target).
double mutual_information_score(std::span<const double> x, const SelectionTarget& target);

/// Top-k candidates by score, ties broken by ascending name; the result is in
/// (score desc, name asc) order, independent of the input order. k larger than
/// the candidate count returns everything and appends a warning.
std::vector<std::string> select_features(std::span<const CandidateFeature> candidates, const SelectionTarget& target,
                                         Selection method, std::size_t k,
                                         std::vector<std::string>* warnings = nullptr);

}  // namespace deskml::features
