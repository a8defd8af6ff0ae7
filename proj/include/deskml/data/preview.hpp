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

#include "deskml/common/json.hpp"
#include "deskml/data/table.hpp"

namespace deskml::data {

inline constexpr long kMaxPreviewLimit = 1000;

/// Rows [offset, offset + limit) in ingestion order; missing cells render as
/// null. An offset at or past the end yields an empty page.
/// Throws Error(kInvalidArgument) for a negative offset or limit outside [1, 1000].
Json preview(const Table& table, long offset, long limit);

}  // namespace deskml::data
