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

namespace deskml::service {

/// JSON Schema documents for request and response bodies, served under
/// /schemas/<name>.
std::vector<std::string> schema_names();

/// Errors: kNotFound "SCHEMA_NOT_FOUND".
Json schema(const std::string& name);

/// {"schemas": [{"name", "href"}...]}
Json schema_index();

}  // namespace deskml::service
