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

#include "deskml/models/tree.hpp"

#include <algorithm>
#include <numeric>

#include "deskml/common/error.hpp"

namespace deskml::models {

const TreeNode& find_leaf(const TreeNode& node, std::span<const double> row) noexcept {
  if (node.is_leaf()) return node;
  return find_leaf(row[node.feature] <= node.threshold ? *node.left : *node.right, row);
}

std::size_t node_count(const TreeNode& node) noexcept {
  return node.is_leaf() ? 1 : 1 + node_count(*node.left) + node_count(*node.right);
}

std::size_t tree_depth(const TreeNode& node) noexcept {
  return node.is_leaf() ? 0 : 1 + std::max(tree_depth(*node.left), tree_depth(*node.right));
}

std::size_t path_length(const TreeNode& node, std::span<const double> row) noexcept {
  std::size_t n = 0;
  for (const TreeNode* p = &node; !p->is_leaf(); ++n) p = row[p->feature] <= p->threshold ? p->left.get() : p->right.get();
  return n;
}

Json tree_to_json(const TreeNode& node) {
  if (node.is_leaf()) return Json{{"value", node.value}};
  return Json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", tree_to_json(*node.left)},
              {"right", tree_to_json(*node.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const Json& j) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("value")) {
    node->value = j.at("value").get<std::vector<double>>();
    return node;
  }
  node->feature = j.at("feature").get<int>();
  node->threshold = j.at("threshold").get<double>();
  if (node->feature < 0) fail(ErrorKind::kInvalidArgument, "INVALID_MODEL", "negative split feature");
  node->left = tree_from_json(j.at("left"));
  node->right = tree_from_json(j.at("right"));
  return node;
}

RankedFeatures::RankedFeatures(const Matrix& x) : rows(x.rows()), uniques(x.cols()), ranks(x.cols()) {
  std::vector<double> col;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    col = x.column(f);
    auto& u = uniques[f];
    u = col;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    auto& rk = ranks[f];
    rk.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      rk[r] = static_cast<std::uint32_t>(std::lower_bound(u.begin(), u.end(), col[r]) - u.begin());
    }
  }
}

namespace {

struct Split {
  int feature = -1;
  std::uint32_t rank = 0;  // rows with rank <= this go left
  double threshold = 0.0;
  double score = 0.0;
};

class Grower {
 public:
  Grower(const RankedFeatures& f, std::span<const double> target, std::size_t classes, SplitCriterion criterion,
         const TreeGrowth& growth, const LeafValue& leaf_value, Rng* rng, std::uint64_t* ops)
      : f_(f),
        target_(target),
        criterion_(criterion),
        growth_(growth),
        leaf_value_(leaf_value),
        rng_(rng),
        ops_(ops),
        stride_(criterion == SplitCriterion::kGini ? classes + 1 : 2) {
    std::size_t max_u = 0;
    for (const auto& u : f_.uniques) max_u = std::max(max_u, u.size());
    hist_.assign(max_u * stride_, 0.0);
    present_.assign(max_u, 0);
    all_features_.resize(f_.uniques.size());
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  std::unique_ptr<TreeNode> grow(std::span<std::uint32_t> rows, int depth) {
    auto node = std::make_unique<TreeNode>();
    const std::size_t n = rows.size();
    if (depth < growth_.max_depth && n >= 2 * static_cast<std::size_t>(growth_.min_leaf) && !constant_target(rows)) {
      const Split best = find_split(rows);
      if (best.feature >= 0) {
        auto mid = std::partition(rows.begin(), rows.end(),
                                  [&](std::uint32_t r) { return f_.ranks[best.feature][r] <= best.rank; });
        const auto left_n = static_cast<std::size_t>(mid - rows.begin());
        node->feature = best.feature;
        node->threshold = best.threshold;
        node->left = grow(rows.first(left_n), depth + 1);
        node->right = grow(rows.subspan(left_n), depth + 1);
        return node;
      }
    }
    node->value = leaf_value_(rows);
    return node;
  }

 private:
  bool constant_target(std::span<const std::uint32_t> rows) const {
    const double first = target_[rows[0]];
    return std::all_of(rows.begin(), rows.end(), [&](std::uint32_t r) { return target_[r] == first; });
  }

  std::span<const std::size_t> candidate_features() {
    const std::size_t d = all_features_.size();
    if (growth_.max_features == 0 || growth_.max_features >= d || rng_ == nullptr) return all_features_;
    subset_ = all_features_;
    for (std::size_t i = 0; i < growth_.max_features; ++i) {
      std::swap(subset_[i], subset_[i + rng_->index(d - i)]);
    }
    subset_.resize(growth_.max_features);
    std::sort(subset_.begin(), subset_.end());
    return subset_;
  }

  void add_stats(double* s, std::uint32_t r) const {
    if (criterion_ == SplitCriterion::kGini) {
      s[static_cast<std::size_t>(target_[r])] += 1.0;
      s[stride_ - 1] += 1.0;
    } else {
      s[0] += target_[r];
      s[1] += 1.0;
    }
  }

  double side_score(const double* s) const {
    if (criterion_ == SplitCriterion::kGini) {
      const double n = s[stride_ - 1];
      double q = 0.0;
      for (std::size_t k = 0; k + 1 < stride_; ++k) q += s[k] * s[k];
      return q / n;
    }
    return s[0] * s[0] / s[1];
  }

  double count_of(const double* s) const { return s[stride_ - 1]; }

  // Collects the node's distinct ranks of feature f, ascending, with per-rank
  // statistics in bin_stats_.
  void collect_bins(std::size_t f, std::span<const std::uint32_t> rows) {
    bins_.clear();
    const auto& rk = f_.ranks[f];
    const std::size_t u = f_.uniques[f].size();
    if (u <= 2 * rows.size()) {
      for (auto r : rows) {
        const auto b = rk[r];
        present_[b] = 1;
        add_stats(&hist_[b * stride_], r);
      }
      for (std::uint32_t b = 0; b < u; ++b) {
        if (!present_[b]) continue;
        present_[b] = 0;
        bins_.push_back(b);
        bin_stats_.resize(bins_.size() * stride_);
        std::copy_n(&hist_[b * stride_], stride_, &bin_stats_[(bins_.size() - 1) * stride_]);
        std::fill_n(&hist_[b * stride_], stride_, 0.0);
      }
      return;
    }
    sorted_.assign(rows.begin(), rows.end());
    std::sort(sorted_.begin(), sorted_.end(), [&](std::uint32_t a, std::uint32_t b) {
      return rk[a] != rk[b] ? rk[a] < rk[b] : a < b;
    });
    for (auto r : sorted_) {
      if (bins_.empty() || bins_.back() != rk[r]) {
        bins_.push_back(rk[r]);
        bin_stats_.resize(bins_.size() * stride_);
        std::fill_n(&bin_stats_[(bins_.size() - 1) * stride_], stride_, 0.0);
      }
      add_stats(&bin_stats_[(bins_.size() - 1) * stride_], r);
    }
  }

  Split find_split(std::span<const std::uint32_t> rows) {
    Split best;
    const auto features = candidate_features();
    if (ops_) *ops_ += rows.size() * features.size();
    std::vector<double> total(stride_, 0.0), left(stride_), right(stride_);
    for (auto r : rows) add_stats(total.data(), r);
    const double n = count_of(total.data());
    const double min_leaf = growth_.min_leaf;
    for (std::size_t f : features) {
      collect_bins(f, rows);
      if (bins_.size() < 2) continue;
      std::fill(left.begin(), left.end(), 0.0);
      for (std::size_t i = 0; i + 1 < bins_.size(); ++i) {
        const double* s = &bin_stats_[i * stride_];
        for (std::size_t k = 0; k < stride_; ++k) left[k] += s[k];
        const double nl = count_of(left.data());
        if (nl < min_leaf) continue;
        if (n - nl < min_leaf) break;
        for (std::size_t k = 0; k < stride_; ++k) right[k] = total[k] - left[k];
        const double score = side_score(left.data()) + side_score(right.data());
        if (best.feature < 0 || score > best.score) {
          const auto& u = f_.uniques[f];
          const double lo = u[bins_[i]], hi = u[bins_[i + 1]];
          double mid = std::midpoint(lo, hi);
          if (!(mid < hi)) mid = lo;
          best = Split{static_cast<int>(f), bins_[i], mid, score};
        }
      }
    }
    return best;
  }

  const RankedFeatures& f_;
  std::span<const double> target_;
  SplitCriterion criterion_;
  TreeGrowth growth_;
  const LeafValue& leaf_value_;
  Rng* rng_;
  std::uint64_t* ops_;
  std::size_t stride_;
  std::vector<double> hist_;
  std::vector<std::uint8_t> present_;
  std::vector<std::uint32_t> bins_;
  std::vector<double> bin_stats_;
  std::vector<std::uint32_t> sorted_;
  std::vector<std::size_t> all_features_;
  std::vector<std::size_t> subset_;
};

}  // namespace

std::unique_ptr<TreeNode> grow_tree(const RankedFeatures& features, std::span<const double> target,
                                    std::size_t classes, SplitCriterion criterion, const TreeGrowth& growth,
                                    std::vector<std::uint32_t> rows, const LeafValue& leaf_value, Rng* rng,
                                    std::uint64_t* ops) {
  if (rows.empty()) fail(ErrorKind::kInvalidArgument, "EMPTY_TRAINING_SET", "cannot grow a tree on zero rows");
  Grower g(features, target, classes, criterion, growth, leaf_value, rng, ops);
  return g.grow(rows, 0);
}

}  // namespace deskml::models
