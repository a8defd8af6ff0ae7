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

#include "deskml/eval/green.hpp"

#include <cmath>

#include "deskml/common/error.hpp"

namespace deskml::eval {

std::string_view basis_name(EnergyBasis b) noexcept { return b == EnergyBasis::kTraining ? "training" : "prediction"; }

EnergyEstimate green_estimate(double compute_seconds, EnergyBasis basis, const PowerConfig& power) {
  if (!(compute_seconds >= 0.0) || !std::isfinite(compute_seconds)) {
    fail(ErrorKind::kInvalidArgument, "INVALID_ENERGY_INPUT", "compute seconds must be finite and non-negative");
  }
  if (!(power.power_watts > 0.0) || !std::isfinite(power.power_watts)) {
    fail(ErrorKind::kInvalidArgument, "INVALID_ENERGY_INPUT", "power_watts must be positive");
  }
  if (!(power.grid_intensity_kg_per_kwh >= 0.0) || !std::isfinite(power.grid_intensity_kg_per_kwh)) {
    fail(ErrorKind::kInvalidArgument, "INVALID_ENERGY_INPUT", "grid intensity must be non-negative");
  }
  EnergyEstimate e;
  e.basis = basis;
  e.power_watts = power.power_watts;
  e.grid_intensity_kg_per_kwh = power.grid_intensity_kg_per_kwh;
  e.electricity_kwh = compute_seconds * power.power_watts / 3.6e6;
  e.carbon_kg = e.electricity_kwh * power.grid_intensity_kg_per_kwh;
  return e;
}

Json to_json(const EnergyEstimate& e) {
  return {{"electricity_kwh", e.electricity_kwh},
          {"carbon_kg", e.carbon_kg},
          {"basis", basis_name(e.basis)},
          {"power_watts", e.power_watts},
          {"grid_intensity_kg_per_kwh", e.grid_intensity_kg_per_kwh}};
}

}  // namespace deskml::eval
