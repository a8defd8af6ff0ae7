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

#include "deskml/codegen/ir.hpp"
#include "deskml/common/json.hpp"
#include "deskml/common/matrix.hpp"
#include "deskml/features/pipeline.hpp"
#include "deskml/models/model.hpp"

namespace deskml::codegen {

/// Engine-native compiled form: every tree of every group packed into one
/// contiguous node array, evaluated iteratively on the encoded input row.
class NativeModel {
 public:
  explicit NativeModel(const ModelIR& ir);
  /// Loads the engine-native dialect (IR JSON).
  static NativeModel from_json(const Json& j);

  std::size_t input_count() const noexcept { return inputs_; }
  std::size_t output_count() const noexcept { return outputs_; }

  /// `scratch` is reused between calls; one per thread.
  void predict(std::span<const double> input, std::span<double> out, std::vector<double>& scratch) const;
  Matrix predict(const Matrix& encoded) const;

  /// Bytes held by the packed representation.
  std::size_t memory_bytes() const noexcept;

 private:
  struct Node {
    double threshold;
    std::int32_t feature;  // -1 for leaves
    std::int32_t left;     // absolute node index; leaf: offset into values_
    std::int32_t right;
  };

  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::size_t scores_ = 0;
  std::vector<IrFeature> features_;
  bool identity_features_ = false;  // features are the inputs, unchanged
  std::vector<double> linear_;      // scores x (features + 1), bias last
  bool linear_model_ = false;
  models::Combiner combiner_ = models::Combiner::kMean;
  double learning_rate_ = 1.0;
  std::vector<double> base_;
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<std::vector<std::int32_t>> roots_;  // per group
  models::OutputTransform transform_ = models::OutputTransform::kIdentity;
};

struct BenchmarkResult {
  std::size_t rows = 0;
  int repeats = 0;
  double interpreted_ns_per_row = 0.0;
  double compiled_ns_per_row = 0.0;
  double ratio = 0.0;  // interpreted / compiled
  std::size_t interpreted_bytes = 0;
  std::size_t compiled_bytes = 0;
};

Json to_json(const BenchmarkResult& b);

/// Approximate heap footprint of the engine's model representation.
std::size_t model_memory_bytes(const models::TrainedModel& model);

/// Median over `repeats` timed runs (after one warm-up) of batch prediction on
/// the same encoded rows: the engine path (pipeline finish + model predict)
/// against the native compiled model. `pipeline` may be null for models
/// trained directly on the matrix.
BenchmarkResult benchmark(const models::TrainedModel& model, const features::FittedPipeline* pipeline,
                          const NativeModel& compiled, const Matrix& encoded, int repeats = 5);

}  // namespace deskml::codegen
