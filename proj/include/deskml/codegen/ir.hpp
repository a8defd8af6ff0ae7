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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/matrix.hpp"
#include "deskml/features/pipeline.hpp"
#include "deskml/models/model.hpp"

namespace deskml::codegen {

/// One model feature computed from the encoded input row:
///   source  input[input] | apply_op(op, input[left], input[right]) | constant
///   then    (value - shift) / scale when the affine is active (scale 0 -> 0).
struct IrFeature {
  enum class Source { kInput, kGenerated, kConstant };

  std::string name;
  Source source = Source::kInput;
  std::size_t input = 0;
  features::GenOp op = features::GenOp::kMul;
  std::size_t left = 0;
  std::size_t right = 0;
  double constant = 0.0;
  features::Affine affine;

  friend bool operator==(const IrFeature&, const IrFeature&) = default;
};

/// Flattened tree node. Leaves have feature -1 and `value` indexing the
/// tree's value array. Children always sit at higher indices than the parent.
struct FlatNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t value = -1;
  double visits = 0.0;  // visit count from profiling; 0 when unknown

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const FlatNode&, const FlatNode&) = default;
};

struct FlatTree {
  std::vector<FlatNode> nodes;  // root at 0
  std::vector<double> values;   // leaf payloads, `width` per leaf
  std::size_t width = 1;

  std::size_t leaf_offset(const FlatNode& leaf) const noexcept {
    return static_cast<std::size_t>(leaf.value) * width;
  }
  friend bool operator==(const FlatTree&, const FlatTree&) = default;
};

struct LinearPredictor {
  Matrix weights;  // scores x features
  std::vector<double> bias;
  friend bool operator==(const LinearPredictor&, const LinearPredictor&) = default;
};

enum class EnsembleKind { kTree, kForest, kBoosting };
std::string_view ensemble_kind_name(EnsembleKind k) noexcept;

/// kMean: one group whose leaves hold full output vectors, averaged.
/// kSumShrinkage: one group per score; score = base + rate * sum of leaves.
struct TreePredictor {
  EnsembleKind kind = EnsembleKind::kTree;
  models::Combiner combiner = models::Combiner::kMean;
  double learning_rate = 1.0;
  std::vector<double> base;
  std::vector<std::vector<FlatTree>> groups;
  friend bool operator==(const TreePredictor&, const TreePredictor&) = default;
};

using Predictor = std::variant<LinearPredictor, TreePredictor>;

struct OutputSpec {
  models::Task task = models::Task::kClassification;
  std::vector<std::string> classes;
  models::OutputTransform transform = models::OutputTransform::kIdentity;
  std::size_t count = 1;  // classes, or 1 for a real output
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// Compiler-facing form of pipeline + predictor. The input row is the encoded
/// row produced by FittedPipeline::encode (imputed, one-hot/ordinal coded).
struct ModelIR {
  std::string family;
  std::vector<features::EncodedInput> inputs;
  std::vector<features::CategoricalEncoding> encodings;
  std::vector<IrFeature> features;
  Predictor predictor;
  OutputSpec output;
  std::vector<std::string> passes;  // applied passes, in order

  std::size_t score_count() const;
  friend bool operator==(const ModelIR& a, const ModelIR& b) {
    return a.family == b.family && a.features == b.features && a.predictor == b.predictor && a.output == b.output &&
           a.passes == b.passes && inputs_equal(a, b);
  }

 private:
  static bool inputs_equal(const ModelIR& a, const ModelIR& b);
};

/// Errors: kUnsupported "UNSUPPORTED_FAMILY" for knn, gaussian_nb and the
/// forecasters; kInvalidArgument "FEATURE_MISMATCH" when the model's features
/// are not the pipeline outputs.
ModelIR lower(const models::TrainedModel& model, const features::FittedPipeline& pipeline);

/// Lowering for a model trained directly on a numeric matrix: every model
/// feature is a numeric input of the same name.
ModelIR lower(const models::TrainedModel& model);

/// Reference interpreter over the IR: features, predictor, output transform.
void evaluate(const ModelIR& ir, std::span<const double> input, std::span<double> out, std::vector<double>& scratch);
Matrix evaluate(const ModelIR& ir, const Matrix& encoded);

/// Model feature values for one encoded row.
void compute_features(const ModelIR& ir, std::span<const double> input, std::span<double> out);

std::size_t node_count(const TreePredictor& p) noexcept;

Json to_json(const ModelIR& ir);
ModelIR model_ir_from_json(const Json& j);

/// Checks structural invariants: children after parents, every leaf value in
/// range, every node reachable exactly once, feature indices in range.
/// Errors: kInternal "INVALID_IR".
void validate(const ModelIR& ir);

}  // namespace deskml::codegen
