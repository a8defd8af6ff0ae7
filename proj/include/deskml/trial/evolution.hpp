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
#include <span>
#include <vector>

#include "deskml/common/rng.hpp"
#include "deskml/trial/genome.hpp"
#include "deskml/trial/pareto.hpp"

namespace deskml::trial {

inline constexpr double kCrossoverRate = 0.9;
inline constexpr double kMutationRate = 0.2;

struct Standing {
  std::size_t rank = 0;
  double crowding = 0.0;
};

/// Rank (front index) and crowding distance for every point.
std::vector<Standing> rank_population(std::span<const Objectives> points);

/// Better standing: lower rank, then larger crowding.
bool better(const Standing& a, const Standing& b) noexcept;

/// Binary tournament between two uniformly drawn members; the lower index
/// wins a full tie.
std::size_t tournament(std::span<const Standing> standings, Rng& rng);

/// `count` children from tournament-selected parents, crossover with
/// kCrossoverRate, then per-gene mutation with kMutationRate.
std::vector<Genome> make_offspring(std::span<const Genome> parents, std::span<const Standing> standings,
                                   const GenomeSpace& space, std::size_t count, Rng& rng);

/// (mu + lambda) survivor selection over a combined pool: whole fronts in
/// order, the last partial front by descending crowding then ascending hash.
/// Returns pool indices in that order.
std::vector<std::size_t> truncate(std::span<const Objectives> pool, std::span<const std::uint64_t> hashes,
                                  std::size_t mu);

}  // namespace deskml::trial
