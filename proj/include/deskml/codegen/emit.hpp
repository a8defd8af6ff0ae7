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

#include <filesystem>
#include <string>
#include <vector>

#include "deskml/codegen/ir.hpp"
#include "deskml/common/json.hpp"

namespace deskml::codegen {

/// kPortableC: a self-contained C11 translation unit exporting
///   int deskml_predict(const double* input, double* output);
/// kEngineNative: the canonical IR document, loadable by NativeModel.
enum class Dialect { kPortableC, kEngineNative };

inline constexpr std::string_view kEntrySymbol = "deskml_predict";

std::string_view dialect_name(Dialect d) noexcept;
/// Errors: kUnsupported "UNSUPPORTED_DIALECT".
Dialect dialect_from_name(std::string_view name);

struct EmittedArtifact {
  Dialect dialect = Dialect::kPortableC;
  std::string source;
  std::string file_name;  // model.c or model.ir.json
  Json contract;          // inputs, encodings, outputs, checksum
  std::string checksum;   // hex FNV-1a of `source`
};

/// Deterministic: equal IR yields byte-identical source and contract.
EmittedArtifact emit(const ModelIR& ir, Dialect dialect);

/// Writes the source and `contract.json` into `dir`; returns both paths.
std::vector<std::filesystem::path> write_artifact(const EmittedArtifact& artifact, const std::filesystem::path& dir);

/// Engine-independent description of the emitted function's I/O.
Json contract_json(const ModelIR& ir, Dialect dialect, const std::string& checksum);

}  // namespace deskml::codegen
