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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deskml/common/json.hpp"
#include "deskml/data/table.hpp"

namespace deskml::data {

enum class Format { kCsv, kJson };

std::string_view format_name(Format f) noexcept;
Format format_from_name(std::string_view name);

struct ColumnMeta {
  std::string name;
  ColumnType inferred_type = ColumnType::kCategorical;
  std::size_t missing_count = 0;
  std::size_t cardinality = 0;
};

/// An ingested, immutable table. The id is assigned by the DatasetStore.
struct Dataset {
  std::string id;
  std::string name;
  Format format = Format::kCsv;
  std::string created_at;
  std::uint64_t checksum = 0;  // FNV-1a of the payload bytes
  Table table;
  std::vector<std::string> warnings;

  std::size_t row_count() const noexcept { return table.row_count(); }
  std::vector<ColumnMeta> schema() const;
};

/// Parses, sanitises headers (trim, fill blanks, de-duplicate with _2, _3...)
/// and infers column types.
///
/// Errors: kParse for malformed payloads; kUnprocessable "EMPTY_DATASET" when
/// there are no columns or no rows.
Dataset ingest(std::string_view payload, Format format, std::string name);

/// Document stored as dataset.meta.json and returned by GET /datasets/{id}.
Json dataset_meta_json(const Dataset& ds);
Json column_meta_json(const ColumnMeta& m);

}  // namespace deskml::data
