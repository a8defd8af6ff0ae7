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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/matrix.hpp"
#include "deskml/common/rng.hpp"

namespace deskml::models {

/// Engine tree node. Internal nodes route x[feature] <= threshold to the left.
/// Leaves carry a value vector: class distribution, one-hot vote, or a single
/// real.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;
  std::vector<double> value;

  bool is_leaf() const noexcept { return feature < 0; }
};

using TreePtr = std::shared_ptr<const TreeNode>;

const TreeNode& find_leaf(const TreeNode& node, std::span<const double> row) noexcept;
std::size_t node_count(const TreeNode& node) noexcept;
std::size_t tree_depth(const TreeNode& node) noexcept;
/// Number of internal nodes visited from the root to the row's leaf.
std::size_t path_length(const TreeNode& node, std::span<const double> row) noexcept;

Json tree_to_json(const TreeNode& node);
std::unique_ptr<TreeNode> tree_from_json(const Json& j);

enum class SplitCriterion { kGini, kVariance };

struct TreeGrowth {
  int max_depth = 6;
  int min_leaf = 1;
  std::size_t max_features = 0;  // features examined per split; 0 = all
};

/// Per-feature rank coding of a training matrix, shared by every tree grown on
/// it. uniques[f] holds the sorted distinct values of feature f and
/// ranks[f][r] the position of X(r, f) in it.
struct RankedFeatures {
  explicit RankedFeatures(const Matrix& x);

  std::size_t rows = 0;
  std::vector<std::vector<double>> uniques;
  std::vector<std::vector<std::uint32_t>> ranks;
};

/// Leaf valuation over the training rows that reach it (duplicates allowed).
using LeafValue = std::function<std::vector<double>(std::span<const std::uint32_t> rows)>;

/// CART growth. For kGini, `target` holds class codes in [0, classes); for
/// kVariance, real values. A node splits while depth < max_depth, it holds at
/// least 2*min_leaf rows, its target is not constant, and some feature offers
/// a threshold leaving min_leaf rows on both sides. Among thresholds (midpoints
/// of adjacent distinct values in the node) the best impurity decrease wins;
/// ties go to the lowest feature index, then the lowest threshold. `rng` draws
/// the per-split feature subset when max_features is set.
///
/// `ops` accumulates a deterministic work count (rows x features scanned).
std::unique_ptr<TreeNode> grow_tree(const RankedFeatures& features, std::span<const double> target,
                                    std::size_t classes, SplitCriterion criterion, const TreeGrowth& growth,
                                    std::vector<std::uint32_t> rows, const LeafValue& leaf_value, Rng* rng,
                                    std::uint64_t* ops);

}  // namespace deskml::models
