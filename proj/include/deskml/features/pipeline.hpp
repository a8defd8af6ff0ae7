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

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/matrix.hpp"
#include "deskml/data/table.hpp"
#include "deskml/features/selection.hpp"

namespace deskml::features {

enum class Imputation { kMean, kMedian, kMode, kConstant };
enum class Encoder { kOneHot, kOrdinal };
enum class Scaler { kNone, kStandardize, kMinMax };
enum class GenOp { kAdd, kSub, kMul, kDiv };

inline constexpr std::size_t kOneHotCap = 50;
inline constexpr double kSafeDivideEpsilon = 1e-12;
inline constexpr std::string_view kMissingCategory = "__missing__";

std::string_view imputation_name(Imputation v) noexcept;
std::string_view encoder_name(Encoder v) noexcept;
std::string_view scaler_name(Scaler v) noexcept;
std::string_view op_symbol(GenOp v) noexcept;
Imputation imputation_from_name(std::string_view s);
Encoder encoder_from_name(std::string_view s);
Scaler scaler_from_name(std::string_view s);
GenOp op_from_symbol(std::string_view s);

/// a op b with the safe-divide rule: |b| < 1e-12 yields 0.
double apply_op(GenOp op, double a, double b) noexcept;

/// Declarative feature-engineering plan.
struct PipelineSpec {
  Imputation numeric_imputation = Imputation::kMean;
  Imputation categorical_imputation = Imputation::kMode;
  std::map<std::string, Imputation> column_imputation;  // per-column override
  double numeric_fill = 0.0;                            // value for kConstant on numeric columns
  Encoder encoder = Encoder::kOneHot;
  std::map<std::string, Encoder> column_encoder;
  Scaler scaler = Scaler::kNone;
  std::vector<GenOp> generation_ops;
  std::size_t max_generated = 0;
  Selection selection = Selection::kNone;
  std::size_t select_k = 0;           // 0 = keep all
  std::vector<std::string> include;   // empty = every usable column

  friend bool operator==(const PipelineSpec&, const PipelineSpec&) = default;
};

Json to_json(const PipelineSpec& spec);
PipelineSpec pipeline_spec_from_json(const Json& j);

enum class InputKind { kNumeric, kBoolean, kOneHot, kOrdinal };
std::string_view input_kind_name(InputKind k) noexcept;

/// One column of the encoded input space: imputed numeric values, boolean
/// indicators, one-hot indicators or ordinal codes. This is the row format the
/// emitted inference code consumes.
struct EncodedInput {
  std::string name;
  std::string source_column;
  InputKind kind = InputKind::kNumeric;
  std::string category;   // one-hot level
  int date_part = -1;     // 0 year, 1 month, 2 day, 3 weekday
  double fill = 0.0;      // replacement for missing numeric/boolean cells
  double lo = 0.0;        // observed range on the fitting rows
  double hi = 0.0;
};

struct CategoricalEncoding {
  std::string column;
  Encoder encoder = Encoder::kOneHot;
  std::vector<std::string> vocabulary;  // sorted; ordinal code = position + 1
  std::string fill_category;            // used for missing cells
  std::size_t first_input = 0;
};

struct GeneratedFeature {
  std::string name;   // f(<left>,<right>,<op>)
  std::size_t left = 0;   // encoded input indices
  std::size_t right = 0;
  GenOp op = GenOp::kMul;
};

/// y = (x - shift) / scale; scale 0 maps every value to 0.
struct Affine {
  bool active = false;
  double shift = 0.0;
  double scale = 1.0;

  double apply(double x) const noexcept {
    if (!active) return x;
    return scale == 0.0 ? 0.0 : (x - shift) / scale;
  }
  friend bool operator==(const Affine&, const Affine&) = default;
};

/// Learned realisation of a PipelineSpec. Immutable after fit; transform is a
/// pure function of the learned parameters and the input rows.
struct FittedPipeline {
  PipelineSpec spec;
  std::string target;
  std::vector<std::pair<std::string, data::ColumnType>> source_columns;
  std::vector<EncodedInput> inputs;
  std::vector<CategoricalEncoding> encodings;
  std::vector<GeneratedFeature> generated;
  std::vector<std::string> candidate_names;  // inputs, then generated features
  std::vector<Affine> scaling;               // one per candidate
  std::vector<std::size_t> selected;         // candidate indices, ascending
  std::vector<std::string> output_names;
  std::vector<std::string> warnings;

  /// Imputation + encoding: table rows -> encoded input matrix.
  /// Throws Error(kInvalidArgument, "SCHEMA_MISMATCH") naming the offending column.
  Matrix encode(const data::Table& table, std::span<const std::size_t> rows) const;
  Matrix encode(const data::Table& table) const;

  /// Generation, scaling and selection on already encoded rows.
  Matrix finish(const Matrix& encoded) const;

  Matrix transform(const data::Table& table, std::span<const std::size_t> rows) const {
    return finish(encode(table, rows));
  }

  /// Unscaled value of candidate feature c for one encoded row.
  double candidate_raw(std::span<const double> encoded_row, std::size_t c) const;
};

/// Learns the pipeline from `rows` of `table` only. The target column is never
/// part of the feature side. Text columns are skipped with a warning.
///
/// Errors: kNotFound "UNKNOWN_COLUMN" for a missing target or included column.
FittedPipeline fit(const PipelineSpec& spec, const data::Table& table, const std::string& target,
                   std::span<const std::size_t> rows);

/// Class codes (sorted distinct labels) for a categorical/boolean target, raw
/// values for a numeric one.
SelectionTarget selection_target(const data::Table& table, const std::string& target,
                                 std::span<const std::size_t> rows);

Json to_json(const FittedPipeline& fp);
FittedPipeline fitted_pipeline_from_json(const Json& j);

}  // namespace deskml::features
