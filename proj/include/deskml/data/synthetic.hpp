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

#include <cstddef>
#include <cstdint>
#include <string>

namespace deskml::data {

/// Telco-churn-format CSV: 21 columns (customerID ... Churn) with the same
/// column names and value vocabularies as the public telco customer churn
/// table. Churn is drawn from a logistic model of contract type, tenure,
/// service mix and charges, so the target is learnable but noisy. Customers
/// with zero tenure get a blank TotalCharges cell.
std::string synthetic_churn_csv(std::size_t rows = 7043, std::uint64_t seed = 2023);

}  // namespace deskml::data
