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

#include "deskml/trial/pareto.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "deskml/common/error.hpp"

namespace deskml::trial {

bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> counts(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(points[p], points[q])) {
        dominated[p].push_back(q);
      } else if (dominates(points[q], points[p])) {
        ++counts[p];
      }
    }
    if (counts[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto p : current) {
      for (auto q : dominated[p]) {
        if (--counts[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> points, std::span<const std::size_t> front) {
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n <= 2) return std::vector<double>(n, inf);
  std::vector<double> distance(n, 0.0);
  const std::size_t m = points[front[0]].size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[front[a]][k] < points[front[b]][k]; });
    const double lo = points[front[order.front()]][k];
    const double hi = points[front[order.back()]][k];
    if (!(hi > lo)) continue;
    distance[order.front()] = inf;
    distance[order.back()] = inf;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      distance[order[i]] += (points[front[order[i + 1]]][k] - points[front[order[i - 1]]][k]) / (hi - lo);
    }
  }
  return distance;
}

namespace {

double hypervolume_2d(std::vector<std::pair<double, double>> pts, double rx, double ry) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0, best_y = ry;
  for (const auto& [x, y] : pts) {
    if (y < best_y) {
      area += (rx - x) * (best_y - y);
      best_y = y;
    }
  }
  return area;
}

}  // namespace

double hypervolume(std::span<const Objectives> points, std::span<const double> reference) {
  const std::size_t m = reference.size();
  if (m == 0 || m > 3) fail(ErrorKind::kInvalidArgument, "INVALID_OBJECTIVES", "hypervolume supports 1 to 3 objectives");
  std::vector<Objectives> inside;
  for (const auto& p : points) {
    bool ok = p.size() == m;
    for (std::size_t k = 0; ok && k < m; ++k) ok = p[k] < reference[k];
    if (ok) inside.push_back(p);
  }
  if (inside.empty()) return 0.0;
  if (m == 1) {
    double best = reference[0];
    for (const auto& p : inside) best = std::min(best, p[0]);
    return reference[0] - best;
  }
  if (m == 2) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : inside) pts.emplace_back(p[0], p[1]);
    return hypervolume_2d(std::move(pts), reference[0], reference[1]);
  }
  // Slice along the third objective; each slab is a 2-D problem.
  std::sort(inside.begin(), inside.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  double volume = 0.0;
  std::vector<std::pair<double, double>> active;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    active.emplace_back(inside[i][0], inside[i][1]);
    const double top = i + 1 < inside.size() ? inside[i + 1][2] : reference[2];
    if (top > inside[i][2]) volume += hypervolume_2d(active, reference[0], reference[1]) * (top - inside[i][2]);
  }
  return volume;
}

}  // namespace deskml::trial
