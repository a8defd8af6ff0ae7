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

#include <string>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/common/rng.hpp"
#include "deskml/models/family.hpp"

namespace deskml::models {

enum class ParamKind { kInteger, kReal, kCategorical, kBoolean };

std::string_view param_kind_name(ParamKind k) noexcept;

struct ParamDescriptor {
  std::string name;
  ParamKind kind = ParamKind::kReal;
  double lo = 0.0;  // integer/real bounds, inclusive
  double hi = 0.0;
  bool log_scale = false;
  std::vector<std::string> choices;  // categorical
  Json default_value;
};

/// Declarative, versioned search space for one family. Hyperparameter values
/// travel as a JSON object keyed by parameter name.
class HyperparameterSpace {
 public:
  HyperparameterSpace(Family family, int version, std::vector<ParamDescriptor> params);

  Family family() const noexcept { return family_; }
  int version() const noexcept { return version_; }
  const std::vector<ParamDescriptor>& params() const noexcept { return params_; }

  Json defaults() const;
  Json sample(Rng& rng) const;
  Json sample_param(const ParamDescriptor& p, Rng& rng) const;

  bool contains(const Json& values) const noexcept;
  /// Defaults filled in for absent keys; throws Error(kInvalidArgument,
  /// "INVALID_HYPERPARAMETER") for unknown keys or out-of-space values.
  Json resolve(const Json& partial) const;

  Json to_json() const;

 private:
  Family family_;
  int version_;
  std::vector<ParamDescriptor> params_;
};

const HyperparameterSpace& search_space(Family f);

/// Accessors for resolved hyperparameters.
int hp_int(const Json& hp, const char* name);
double hp_real(const Json& hp, const char* name);
bool hp_bool(const Json& hp, const char* name);
std::string hp_string(const Json& hp, const char* name);

}  // namespace deskml::models
