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
#include <vector>

namespace deskml::trial {

using Objectives = std::vector<double>;

/// Minimisation: a <= b everywhere and a < b somewhere.
bool dominates(std::span<const double> a, std::span<const double> b) noexcept;

/// Fast non-dominated sorting. Fronts partition the indices; indices within a
/// front are ascending.
std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives> points);

/// Crowding distance of each member of one front (same order as `front`).
/// Fronts of one or two members are all +inf. Otherwise, per objective, the
/// extreme members get +inf and interior members add the neighbour gap divided
/// by the objective's range; objectives constant over the front add nothing.
std::vector<double> crowding_distance(std::span<const Objectives> points, std::span<const std::size_t> front);

/// Exact hypervolume dominated by `points` and bounded by `reference`
/// (minimisation, up to three objectives). Points not strictly better than the
/// reference in every objective contribute nothing.
double hypervolume(std::span<const Objectives> points, std::span<const double> reference);

}  // namespace deskml::trial
