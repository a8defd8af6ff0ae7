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

#include "deskml/trial/evolution.hpp"

#include <algorithm>
#include <numeric>

namespace deskml::trial {

std::vector<Standing> rank_population(std::span<const Objectives> points) {
  std::vector<Standing> out(points.size());
  const auto fronts = nondominated_sort(points);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    const auto crowd = crowding_distance(points, fronts[f]);
    for (std::size_t i = 0; i < fronts[f].size(); ++i) out[fronts[f][i]] = {f, crowd[i]};
  }
  return out;
}

bool better(const Standing& a, const Standing& b) noexcept {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

std::size_t tournament(std::span<const Standing> standings, Rng& rng) {
  const std::size_t a = rng.index(standings.size());
  const std::size_t b = rng.index(standings.size());
  if (better(standings[a], standings[b])) return a;
  if (better(standings[b], standings[a])) return b;
  return std::min(a, b);
}

std::vector<Genome> make_offspring(std::span<const Genome> parents, std::span<const Standing> standings,
                                   const GenomeSpace& space, std::size_t count, Rng& rng) {
  std::vector<Genome> children;
  children.reserve(count + 1);
  while (children.size() < count) {
    const auto& a = parents[tournament(standings, rng)];
    const auto& b = parents[tournament(standings, rng)];
    auto pair = rng.bernoulli(kCrossoverRate) ? space.crossover(a, b, rng) : std::pair<Genome, Genome>{a, b};
    children.push_back(space.mutate(pair.first, kMutationRate, rng));
    if (children.size() < count) children.push_back(space.mutate(pair.second, kMutationRate, rng));
  }
  return children;
}

std::vector<std::size_t> truncate(std::span<const Objectives> pool, std::span<const std::uint64_t> hashes,
                                  std::size_t mu) {
  std::vector<std::size_t> keep;
  for (const auto& front : nondominated_sort(pool)) {
    if (keep.size() + front.size() <= mu) {
      keep.insert(keep.end(), front.begin(), front.end());
      if (keep.size() == mu) break;
      continue;
    }
    const auto crowd = crowding_distance(pool, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (crowd[a] != crowd[b]) return crowd[a] > crowd[b];
      return hashes[front[a]] < hashes[front[b]];
    });
    for (std::size_t i = 0; keep.size() < mu; ++i) keep.push_back(front[order[i]]);
    break;
  }
  return keep;
}

}  // namespace deskml::trial
