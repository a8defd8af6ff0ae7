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

#include <string_view>

#include "deskml/common/json.hpp"

namespace deskml::eval {

/// Linear power model standing in for hardware energy counters.
struct PowerConfig {
  double power_watts = 65.0;
  double grid_intensity_kg_per_kwh = 0.233;
};

enum class EnergyBasis { kTraining, kPrediction };

std::string_view basis_name(EnergyBasis b) noexcept;

struct EnergyEstimate {
  double electricity_kwh = 0.0;
  double carbon_kg = 0.0;
  EnergyBasis basis = EnergyBasis::kTraining;
  double power_watts = 0.0;
  double grid_intensity_kg_per_kwh = 0.0;
};

/// kwh = seconds * watts / 3.6e6; carbon = kwh * intensity.
/// Errors: "INVALID_ENERGY_INPUT" for negative seconds or intensity, or
/// non-positive power.
EnergyEstimate green_estimate(double compute_seconds, EnergyBasis basis, const PowerConfig& power);

Json to_json(const EnergyEstimate& e);

}  // namespace deskml::eval
