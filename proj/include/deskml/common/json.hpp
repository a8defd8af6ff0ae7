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

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

namespace deskml {

using Json = nlohmann::json;

/// JSON has no representation for non-finite numbers. Infinities are written
/// as the strings "inf"/"-inf" and NaN as null so documents stay round-trippable.
inline Json number_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from_json(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

inline Json optional_to_json(const std::optional<double>& v) {
  return v ? number_to_json(*v) : Json(nullptr);
}

inline std::optional<double> optional_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return number_from_json(j);
}

/// Deterministic compact rendering (object keys are ordered by nlohmann::json).
inline std::string canonical_dump(const Json& j) { return j.dump(); }

}  // namespace deskml
