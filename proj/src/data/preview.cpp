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

#include "deskml/data/preview.hpp"

#include <algorithm>

#include "deskml/common/error.hpp"

namespace deskml::data {

Json preview(const Table& table, long offset, long limit) {
  if (offset < 0) fail(ErrorKind::kInvalidArgument, "INVALID_OFFSET", "offset must be >= 0");
  if (limit < 1 || limit > kMaxPreviewLimit) {
    fail(ErrorKind::kInvalidArgument, "INVALID_LIMIT", "limit must be in [1, 1000]");
  }
  const auto rows = static_cast<long>(table.row_count());
  Json page = Json::array();
  for (long r = offset; r < std::min(rows, offset + limit); ++r) {
    Json row = Json::array();
    for (const auto& c : table.columns()) {
      const auto i = static_cast<std::size_t>(r);
      if (c.is_missing(i)) row.push_back(nullptr);
      else row.push_back(c.cells[i]);
    }
    page.push_back(std::move(row));
  }
  return Json{{"offset", offset},
              {"limit", limit},
              {"row_count", table.row_count()},
              {"columns", table.column_names()},
              {"rows", page}};
}

}  // namespace deskml::data
