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

#include <span>
#include <string>
#include <vector>

#include "deskml/codegen/ir.hpp"

namespace deskml::codegen {

/// Semantics-preserving IR rewrites. Each pass is idempotent and a no-op when
/// it does not apply.
///   fold_affine     absorbs feature scaling into linear weights/bias or into
///                   raw-space split thresholds
///   dead_branch     removes tree branches that no input allowed by the
///                   encoding contract can reach (one-hot/boolean in {0,1},
///                   ordinal codes in [0, vocabulary size], one hot level per
///                   one-hot block, calendar parts in their ranges)
///   reorder         lays out each tree so the more frequently visited child
///                   directly follows its parent (visit counts from profile)
///   fold_constants  replaces features that are constant under the contract
///                   (zero-scale standardisation, x - x) by their value and
///                   drops them from the predictor
enum class Pass { kFoldAffine, kDeadBranch, kReorder, kFoldConstants };

std::string_view pass_name(Pass p) noexcept;
/// Errors: kInvalidArgument "UNKNOWN_PASS".
Pass pass_from_name(std::string_view name);

/// fold_constants, fold_affine, dead_branch, reorder.
std::vector<Pass> default_passes();

ModelIR apply_pass(ModelIR ir, Pass pass);
ModelIR optimize(ModelIR ir, std::span<const Pass> passes);

/// Records how often each tree node is visited by the encoded rows.
void profile_visits(ModelIR& ir, const Matrix& encoded);

/// The largest x with a.apply(x) <= t, so that a.apply(x) <= t holds exactly
/// when x <= raw_threshold(a, t). Returns +inf/-inf when every/no finite x
/// qualifies and NaN when no such bound can be represented.
double raw_threshold(const features::Affine& a, double t) noexcept;

}  // namespace deskml::codegen
