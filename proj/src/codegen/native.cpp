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

#include "deskml/codegen/native.hpp"

#include <algorithm>

#include "deskml/common/error.hpp"
#include "deskml/common/stopwatch.hpp"

namespace deskml::codegen {

NativeModel::NativeModel(const ModelIR& ir)
    : inputs_(ir.inputs.size()),
      outputs_(ir.output.count),
      scores_(ir.score_count()),
      features_(ir.features),
      transform_(ir.output.transform) {
  validate(ir);
  identity_features_ = features_.size() == inputs_;
  for (std::size_t k = 0; k < features_.size() && identity_features_; ++k) {
    const auto& f = features_[k];
    identity_features_ = f.source == IrFeature::Source::kInput && f.input == k && !f.affine.active;
  }
  if (const auto* lin = std::get_if<LinearPredictor>(&ir.predictor)) {
    linear_model_ = true;
    const std::size_t nf = features_.size();
    linear_.resize(scores_ * (nf + 1));
    for (std::size_t r = 0; r < scores_; ++r) {
      for (std::size_t k = 0; k < nf; ++k) linear_[r * (nf + 1) + k] = lin->weights(r, k);
      linear_[r * (nf + 1) + nf] = lin->bias[r];
    }
    return;
  }
  const auto& tp = std::get<TreePredictor>(ir.predictor);
  combiner_ = tp.combiner;
  learning_rate_ = tp.learning_rate;
  base_ = tp.base;
  for (const auto& g : tp.groups) {
    auto& roots = roots_.emplace_back();
    for (const auto& t : g) {
      const auto offset = static_cast<std::int32_t>(nodes_.size());
      const auto value_offset = values_.size();
      roots.push_back(offset);
      for (const auto& n : t.nodes) {
        if (n.is_leaf()) {
          nodes_.push_back({0.0, -1, static_cast<std::int32_t>(value_offset + t.leaf_offset(n)), -1});
        } else {
          nodes_.push_back({n.threshold, n.feature, offset + n.left, offset + n.right});
        }
      }
      values_.insert(values_.end(), t.values.begin(), t.values.end());
    }
  }
}

NativeModel NativeModel::from_json(const Json& j) { return NativeModel(model_ir_from_json(j)); }

void NativeModel::predict(std::span<const double> input, std::span<double> out, std::vector<double>& scratch) const {
  const std::size_t nf = features_.size();
  scratch.resize(nf + scores_);
  const double* f = input.data();
  if (!identity_features_) {
    for (std::size_t k = 0; k < nf; ++k) {
      const auto& ft = features_[k];
      double v = 0.0;
      switch (ft.source) {
        case IrFeature::Source::kInput: v = input[ft.input]; break;
        case IrFeature::Source::kGenerated: v = features::apply_op(ft.op, input[ft.left], input[ft.right]); break;
        case IrFeature::Source::kConstant: v = ft.constant; break;
      }
      scratch[k] = ft.affine.apply(v);
    }
    f = scratch.data();
  }
  double* s = scratch.data() + nf;
  if (linear_model_) {
    for (std::size_t r = 0; r < scores_; ++r) {
      const double* w = linear_.data() + r * (nf + 1);
      double acc = w[nf];
      for (std::size_t k = 0; k < nf; ++k) acc += w[k] * f[k];
      s[r] = acc;
    }
  } else {
    const Node* nodes = nodes_.data();
    auto leaf = [&](std::int32_t i) {
      while (nodes[i].feature >= 0) i = f[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
      return values_.data() + nodes[i].left;
    };
    if (combiner_ == models::Combiner::kMean) {
      std::fill(s, s + scores_, 0.0);
      for (auto root : roots_[0]) {
        const double* v = leaf(root);
        for (std::size_t k = 0; k < scores_; ++k) s[k] += v[k];
      }
      const auto count = static_cast<double>(roots_[0].size());
      for (std::size_t k = 0; k < scores_; ++k) s[k] /= count;
    } else {
      for (std::size_t o = 0; o < scores_; ++o) {
        double acc = 0.0;
        for (auto root : roots_[o]) acc += *leaf(root);
        s[o] = base_[o] + learning_rate_ * acc;
      }
    }
  }
  models::apply_output_transform(transform_, std::span<const double>(s, scores_), out);
}

Matrix NativeModel::predict(const Matrix& encoded) const {
  if (encoded.cols() != inputs_) {
    fail(ErrorKind::kInvalidArgument, "SCHEMA_MISMATCH",
         "input has " + std::to_string(encoded.cols()) + " columns, expected " + std::to_string(inputs_));
  }
  Matrix out(encoded.rows(), outputs_);
  std::vector<double> scratch;
  for (std::size_t r = 0; r < encoded.rows(); ++r) predict(encoded.row(r), out.row(r), scratch);
  return out;
}

std::size_t NativeModel::memory_bytes() const noexcept {
  std::size_t b = sizeof(*this) + nodes_.size() * sizeof(Node) + values_.size() * sizeof(double) +
                  linear_.size() * sizeof(double) + base_.size() * sizeof(double) +
                  features_.size() * sizeof(IrFeature);
  for (const auto& r : roots_) b += r.size() * sizeof(std::int32_t) + sizeof(r);
  return b;
}

Json to_json(const BenchmarkResult& b) {
  return {{"rows", b.rows},
          {"repeats", b.repeats},
          {"interpreted_ns_per_row", b.interpreted_ns_per_row},
          {"compiled_ns_per_row", b.compiled_ns_per_row},
          {"ratio", b.ratio},
          {"interpreted_bytes", b.interpreted_bytes},
          {"compiled_bytes", b.compiled_bytes}};
}

namespace {

std::size_t tree_bytes(const models::TreeNode& n) {
  std::size_t b = sizeof(models::TreeNode) + n.value.capacity() * sizeof(double);
  if (n.left) b += tree_bytes(*n.left);
  if (n.right) b += tree_bytes(*n.right);
  return b;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::size_t model_memory_bytes(const models::TrainedModel& model) {
  std::size_t b = sizeof(models::TrainedModel);
  if (const auto* ens = std::get_if<models::EnsembleParams>(&model.params)) {
    for (const auto& g : ens->groups) {
      for (const auto& t : g) b += tree_bytes(*t) + sizeof(t);
    }
    return b;
  }
  return b + models::parameter_count(model) * sizeof(double);
}

BenchmarkResult benchmark(const models::TrainedModel& model, const features::FittedPipeline* pipeline,
                          const NativeModel& compiled, const Matrix& encoded, int repeats) {
  if (repeats < 1) fail(ErrorKind::kInvalidArgument, "INVALID_REPEATS", "repeats must be at least 1");
  if (encoded.rows() == 0) fail(ErrorKind::kInvalidArgument, "EMPTY_BENCHMARK", "benchmark needs at least one row");
  BenchmarkResult b;
  b.rows = encoded.rows();
  b.repeats = repeats;
  volatile double sink = 0.0;
  auto engine = [&] {
    const auto p = pipeline ? models::predict(model, pipeline->finish(encoded)) : models::predict(model, encoded);
    sink = sink + p.values.back();
  };
  auto native = [&] {
    const Matrix out = compiled.predict(encoded);
    const auto row = out.row(out.rows() - 1);
    sink = sink + static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin());
  };
  auto time = [&](auto&& fn) {
    fn();
    std::vector<double> runs;
    for (int i = 0; i < repeats; ++i) {
      Stopwatch sw;
      fn();
      runs.push_back(sw.seconds() * 1e9 / static_cast<double>(encoded.rows()));
    }
    return median(std::move(runs));
  };
  b.interpreted_ns_per_row = time(engine);
  b.compiled_ns_per_row = time(native);
  b.ratio = b.compiled_ns_per_row > 0 ? b.interpreted_ns_per_row / b.compiled_ns_per_row : 0.0;
  b.interpreted_bytes = model_memory_bytes(model);
  b.compiled_bytes = compiled.memory_bytes();
  return b;
}

}  // namespace deskml::codegen
