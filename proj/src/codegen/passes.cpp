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

#include "deskml/codegen/passes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deskml/common/error.hpp"

namespace deskml::codegen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view pass_name(Pass p) noexcept {
  switch (p) {
    case Pass::kFoldAffine: return "fold_affine";
    case Pass::kDeadBranch: return "dead_branch";
    case Pass::kReorder: return "reorder";
    case Pass::kFoldConstants: return "fold_constants";
  }
  return "fold_affine";
}

Pass pass_from_name(std::string_view name) {
  for (auto p : {Pass::kFoldAffine, Pass::kDeadBranch, Pass::kReorder, Pass::kFoldConstants}) {
    if (pass_name(p) == name) return p;
  }
  fail(ErrorKind::kInvalidArgument, "UNKNOWN_PASS",
       "unknown pass '" + std::string(name) + "'; expected fold_affine, dead_branch, reorder or fold_constants");
}

std::vector<Pass> default_passes() {
  return {Pass::kFoldConstants, Pass::kFoldAffine, Pass::kDeadBranch, Pass::kReorder};
}

double raw_threshold(const features::Affine& a, double t) noexcept {
  if (!a.active) return t;
  if (a.scale == 0.0) return 0.0 <= t ? kInf : -kInf;
  if (!(a.scale > 0.0)) return std::nan("");
  auto f = [&](double x) { return (x - a.shift) / a.scale; };
  double x = a.shift + t * a.scale;
  if (!std::isfinite(x)) return std::nan("");
  // f is monotone in floating point, so the qualifying set is (-inf, X].
  if (f(x) <= t) {
    for (int i = 0; i < 4096; ++i) {
      const double up = std::nextafter(x, kInf);
      if (!(f(up) <= t)) return x;
      x = up;
    }
  } else {
    for (int i = 0; i < 4096; ++i) {
      x = std::nextafter(x, -kInf);
      if (f(x) <= t) return x;
    }
  }
  return std::nan("");
}

namespace {

// ---------------------------------------------------------------------------
// Value ranges of encoded inputs under the encoding contract

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool integral = false;

  bool empty() const noexcept { return lo > hi; }
};

std::vector<Range> contract_domains(const ModelIR& ir) {
  std::vector<Range> out(ir.inputs.size());
  for (std::size_t i = 0; i < ir.inputs.size(); ++i) {
    const auto& in = ir.inputs[i];
    switch (in.kind) {
      case features::InputKind::kOneHot:
      case features::InputKind::kBoolean: out[i] = {0.0, 1.0, true}; break;
      case features::InputKind::kOrdinal:
        for (const auto& e : ir.encodings) {
          if (e.encoder == features::Encoder::kOrdinal && e.first_input == i) {
            out[i] = {0.0, static_cast<double>(e.vocabulary.size()), true};
          }
        }
        break;
      case features::InputKind::kNumeric:
        switch (in.date_part) {
          case 0: out[i] = {-kInf, kInf, true}; break;
          case 1: out[i] = {1.0, 12.0, true}; break;
          case 2: out[i] = {1.0, 31.0, true}; break;
          case 3: out[i] = {0.0, 6.0, true}; break;
          default: break;
        }
        break;
    }
  }
  return out;
}

Range image(const features::Affine& a, Range r) {
  if (!a.active) return r;
  if (a.scale == 0.0) return {0.0, 0.0, false};
  return {a.apply(r.lo), a.apply(r.hi), false};
}

Range op_range(features::GenOp op, const Range& a, const Range& b) {
  const bool finite = std::isfinite(a.lo) && std::isfinite(a.hi) && std::isfinite(b.lo) && std::isfinite(b.hi);
  if (!finite) return {};
  switch (op) {
    case features::GenOp::kAdd: return {a.lo + b.lo, a.hi + b.hi, false};
    case features::GenOp::kSub: return {a.lo - b.hi, a.hi - b.lo, false};
    case features::GenOp::kMul: {
      const double c[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      return {*std::min_element(c, c + 4), *std::max_element(c, c + 4), false};
    }
    case features::GenOp::kDiv: return {};
  }
  return {};
}

enum class Route { kBoth, kLeft, kRight };

/// Rebuilds one tree in preorder, dropping unreachable branches. Path ranges
/// narrow on plain-input features; other features are judged by their range.
class Pruner {
 public:
  Pruner(const ModelIR& ir, std::vector<Range> domains) : ir_(ir), ranges_(std::move(domains)) {}

  FlatTree run(const FlatTree& in) {
    in_ = &in;
    out_ = FlatTree{};
    out_.width = in.width;
    copy(0);
    return std::move(out_);
  }

 private:
  Route route(const FlatNode& n, double& raw) const {
    const auto& f = ir_.features[static_cast<std::size_t>(n.feature)];
    raw = std::nan("");
    if (f.source == IrFeature::Source::kInput) {
      raw = raw_threshold(f.affine, n.threshold);
      if (std::isnan(raw)) return Route::kBoth;
      const auto& r = ranges_[f.input];
      if (r.hi <= raw) return Route::kLeft;
      if (r.lo > raw) return Route::kRight;
      return Route::kBoth;
    }
    Range v;
    if (f.source == IrFeature::Source::kConstant) {
      v = {f.constant, f.constant, false};
    } else {
      v = op_range(f.op, ranges_[f.left], ranges_[f.right]);
    }
    v = image(f.affine, v);
    if (v.hi <= n.threshold) return Route::kLeft;
    if (v.lo > n.threshold) return Route::kRight;
    return Route::kBoth;
  }

  // Copies the subtree at `i`; returns the new index.
  std::int32_t copy(std::size_t i) {
    const auto& n = in_->nodes[i];
    if (n.is_leaf()) {
      const auto index = static_cast<std::int32_t>(out_.nodes.size());
      FlatNode leaf = n;
      leaf.value = static_cast<std::int32_t>(out_.values.size() / out_.width);
      const auto off = in_->leaf_offset(n);
      out_.values.insert(out_.values.end(), in_->values.begin() + static_cast<std::ptrdiff_t>(off),
                         in_->values.begin() + static_cast<std::ptrdiff_t>(off + in_->width));
      out_.nodes.push_back(leaf);
      return index;
    }
    double raw = 0.0;
    switch (route(n, raw)) {
      case Route::kLeft: return copy(static_cast<std::size_t>(n.left));
      case Route::kRight: return copy(static_cast<std::size_t>(n.right));
      case Route::kBoth: break;
    }
    const auto index = static_cast<std::int32_t>(out_.nodes.size());
    out_.nodes.push_back(n);
    const auto& f = ir_.features[static_cast<std::size_t>(n.feature)];
    const bool narrow = f.source == IrFeature::Source::kInput && !std::isnan(raw);
    std::vector<Range> saved;
    if (narrow) saved = ranges_;

    if (narrow) {
      auto& r = ranges_[f.input];
      r.hi = std::min(r.hi, r.integral ? std::floor(raw) : raw);
    }
    const auto left = copy(static_cast<std::size_t>(n.left));
    if (narrow) {
      ranges_ = saved;
      auto& r = ranges_[f.input];
      const double above = std::nextafter(raw, kInf);
      r.lo = std::max(r.lo, r.integral ? std::ceil(above) : above);
      const auto& in = ir_.inputs[f.input];
      if (in.kind == features::InputKind::kOneHot && r.lo >= 1.0) {
        for (std::size_t j = 0; j < ir_.inputs.size(); ++j) {
          const auto& other = ir_.inputs[j];
          if (j != f.input && other.kind == features::InputKind::kOneHot && other.source_column == in.source_column) {
            ranges_[j].hi = std::min(ranges_[j].hi, 0.0);
          }
        }
      }
    }
    const auto right = copy(static_cast<std::size_t>(n.right));
    if (narrow) ranges_ = std::move(saved);
    out_.nodes[static_cast<std::size_t>(index)].left = left;
    out_.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  const ModelIR& ir_;
  std::vector<Range> ranges_;
  const FlatTree* in_ = nullptr;
  FlatTree out_;
};

void prune_trees(ModelIR& ir, std::vector<Range> domains) {
  auto* tp = std::get_if<TreePredictor>(&ir.predictor);
  if (!tp) return;
  Pruner pruner(ir, std::move(domains));
  for (auto& g : tp->groups) {
    for (auto& t : g) t = pruner.run(t);
  }
}

/// Drops features no tree splits on and renumbers the rest.
void drop_unused_tree_features(ModelIR& ir) {
  auto* tp = std::get_if<TreePredictor>(&ir.predictor);
  if (!tp) return;
  std::vector<bool> used(ir.features.size(), false);
  for (const auto& g : tp->groups) {
    for (const auto& t : g) {
      for (const auto& n : t.nodes) {
        if (!n.is_leaf()) used[static_cast<std::size_t>(n.feature)] = true;
      }
    }
  }
  std::vector<std::int32_t> remap(ir.features.size(), -1);
  std::vector<IrFeature> kept;
  for (std::size_t k = 0; k < ir.features.size(); ++k) {
    if (!used[k]) continue;
    remap[k] = static_cast<std::int32_t>(kept.size());
    kept.push_back(ir.features[k]);
  }
  if (kept.size() == ir.features.size()) return;
  ir.features = std::move(kept);
  for (auto& g : tp->groups) {
    for (auto& t : g) {
      for (auto& n : t.nodes) {
        if (!n.is_leaf()) n.feature = remap[static_cast<std::size_t>(n.feature)];
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Passes

void fold_affine(ModelIR& ir) {
  if (auto* lin = std::get_if<LinearPredictor>(&ir.predictor)) {
    for (std::size_t k = 0; k < ir.features.size(); ++k) {
      auto& a = ir.features[k].affine;
      if (!a.active) continue;
      for (std::size_t r = 0; r < lin->bias.size(); ++r) {
        double& w = lin->weights(r, k);
        if (a.scale == 0.0) {
          w = 0.0;
        } else {
          lin->bias[r] -= w * a.shift / a.scale;
          w /= a.scale;
        }
      }
      a = features::Affine{};
    }
    return;
  }
  auto& tp = std::get<TreePredictor>(ir.predictor);
  for (std::size_t k = 0; k < ir.features.size(); ++k) {
    auto& a = ir.features[k].affine;
    if (!a.active || a.scale == 0.0) continue;
    // Every split on the feature must have a finite raw-space threshold.
    bool foldable = true;
    for (const auto& g : tp.groups) {
      for (const auto& t : g) {
        for (const auto& n : t.nodes) {
          if (n.feature == static_cast<std::int32_t>(k) && !std::isfinite(raw_threshold(a, n.threshold))) {
            foldable = false;
          }
        }
      }
    }
    if (!foldable) continue;
    for (auto& g : tp.groups) {
      for (auto& t : g) {
        for (auto& n : t.nodes) {
          if (n.feature == static_cast<std::int32_t>(k)) n.threshold = raw_threshold(a, n.threshold);
        }
      }
    }
    a = features::Affine{};
  }
}

void fold_constants(ModelIR& ir) {
  std::vector<bool> constant(ir.features.size(), false);
  for (std::size_t k = 0; k < ir.features.size(); ++k) {
    auto& f = ir.features[k];
    std::optional<double> raw;
    if (f.source == IrFeature::Source::kConstant) raw = f.constant;
    if (f.source == IrFeature::Source::kGenerated && f.left == f.right && f.op == features::GenOp::kSub) raw = 0.0;
    if (f.affine.active && f.affine.scale == 0.0) raw = 0.0;
    if (!raw) continue;
    f.source = IrFeature::Source::kConstant;
    f.constant = f.affine.apply(*raw);
    f.affine = features::Affine{};
    constant[k] = true;
  }
  if (std::find(constant.begin(), constant.end(), true) == constant.end()) return;

  if (auto* lin = std::get_if<LinearPredictor>(&ir.predictor)) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < ir.features.size(); ++k) {
      if (!constant[k]) {
        keep.push_back(k);
        continue;
      }
      const double c = ir.features[k].constant;
      if (c != 0.0) {
        for (std::size_t r = 0; r < lin->bias.size(); ++r) lin->bias[r] += lin->weights(r, k) * c;
      }
    }
    Matrix w(lin->weights.rows(), keep.size());
    for (std::size_t r = 0; r < w.rows(); ++r) {
      for (std::size_t j = 0; j < keep.size(); ++j) w(r, j) = lin->weights(r, keep[j]);
    }
    lin->weights = std::move(w);
    std::vector<IrFeature> kept;
    for (auto k : keep) kept.push_back(ir.features[k]);
    ir.features = std::move(kept);
    return;
  }
  prune_trees(ir, std::vector<Range>(ir.inputs.size()));
  drop_unused_tree_features(ir);
}

void dead_branch(ModelIR& ir) {
  prune_trees(ir, contract_domains(ir));
  drop_unused_tree_features(ir);
}

void reorder_tree(const FlatTree& in, std::size_t i, FlatTree& out) {
  const auto& n = in.nodes[i];
  const auto index = out.nodes.size();
  out.nodes.push_back(n);
  if (n.is_leaf()) {
    out.nodes[index].value = static_cast<std::int32_t>(out.values.size() / out.width);
    const auto off = in.leaf_offset(n);
    out.values.insert(out.values.end(), in.values.begin() + static_cast<std::ptrdiff_t>(off),
                      in.values.begin() + static_cast<std::ptrdiff_t>(off + in.width));
    return;
  }
  const auto l = static_cast<std::size_t>(n.left), r = static_cast<std::size_t>(n.right);
  const bool right_first = in.nodes[r].visits > in.nodes[l].visits;
  const auto first = right_first ? r : l, second = right_first ? l : r;
  const auto first_index = static_cast<std::int32_t>(out.nodes.size());
  reorder_tree(in, first, out);
  const auto second_index = static_cast<std::int32_t>(out.nodes.size());
  reorder_tree(in, second, out);
  out.nodes[index].left = right_first ? second_index : first_index;
  out.nodes[index].right = right_first ? first_index : second_index;
}

void reorder(ModelIR& ir) {
  auto* tp = std::get_if<TreePredictor>(&ir.predictor);
  if (!tp) return;
  for (auto& g : tp->groups) {
    for (auto& t : g) {
      FlatTree out;
      out.width = t.width;
      reorder_tree(t, 0, out);
      t = std::move(out);
    }
  }
}

}  // namespace

ModelIR apply_pass(ModelIR ir, Pass pass) {
  switch (pass) {
    case Pass::kFoldAffine: fold_affine(ir); break;
    case Pass::kDeadBranch: dead_branch(ir); break;
    case Pass::kReorder: reorder(ir); break;
    case Pass::kFoldConstants: fold_constants(ir); break;
  }
  const std::string name(pass_name(pass));
  if (std::find(ir.passes.begin(), ir.passes.end(), name) == ir.passes.end()) ir.passes.push_back(name);
  return ir;
}

ModelIR optimize(ModelIR ir, std::span<const Pass> passes) {
  for (auto p : passes) ir = apply_pass(std::move(ir), p);
  validate(ir);
  return ir;
}

void profile_visits(ModelIR& ir, const Matrix& encoded) {
  auto* tp = std::get_if<TreePredictor>(&ir.predictor);
  if (!tp) return;
  for (auto& g : tp->groups) {
    for (auto& t : g) {
      for (auto& n : t.nodes) n.visits = 0.0;
    }
  }
  std::vector<double> f(ir.features.size());
  for (std::size_t r = 0; r < encoded.rows(); ++r) {
    compute_features(ir, encoded.row(r), f);
    for (auto& g : tp->groups) {
      for (auto& t : g) {
        std::size_t i = 0;
        for (;;) {
          auto& n = t.nodes[i];
          n.visits += 1.0;
          if (n.is_leaf()) break;
          i = static_cast<std::size_t>(f[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
        }
      }
    }
  }
}

}  // namespace deskml::codegen
