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

#include "deskml/data/dataset.hpp"

#include <set>

#include "deskml/common/error.hpp"
#include "deskml/common/hash.hpp"
#include "deskml/common/strings.hpp"
#include "deskml/data/csv.hpp"

namespace deskml::data {

std::string_view format_name(Format f) noexcept { return f == Format::kCsv ? "csv" : "json"; }

Format format_from_name(std::string_view name) {
  if (iequals(name, "csv")) return Format::kCsv;
  if (iequals(name, "json")) return Format::kJson;
  fail(ErrorKind::kInvalidArgument, "UNSUPPORTED_FORMAT", "unsupported format '" + std::string(name) + "' (csv, json)");
}

std::vector<ColumnMeta> Dataset::schema() const {
  std::vector<ColumnMeta> out;
  for (const auto& c : table.columns()) out.push_back({c.name, c.type, c.missing_count, c.cardinality});
  return out;
}

Dataset ingest(std::string_view payload, Format format, std::string name) {
  RawTable raw = format == Format::kCsv ? parse_csv(payload) : parse_json_records(payload);
  if (raw.header.empty()) fail(ErrorKind::kUnprocessable, "EMPTY_DATASET", "payload has no columns");
  if (raw.rows.empty()) fail(ErrorKind::kUnprocessable, "EMPTY_DATASET", "payload has no data rows");

  Dataset ds;
  ds.name = std::move(name);
  ds.format = format;
  ds.created_at = utc_timestamp();
  ds.checksum = fnv1a64(payload);

  std::set<std::string> used;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < raw.header.size(); ++i) {
    std::string base(trim(raw.header[i]));
    if (base.empty()) base = "column_" + std::to_string(i + 1);
    std::string candidate = base;
    for (int k = 2; used.contains(candidate); ++k) candidate = base + "_" + std::to_string(k);
    if (candidate != base) {
      ds.warnings.push_back("duplicate column name '" + base + "' renamed to '" + candidate + "'");
    }
    used.insert(candidate);
    names.push_back(std::move(candidate));
  }

  std::vector<Column> columns;
  columns.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::vector<std::string> cells;
    cells.reserve(raw.rows.size());
    for (auto& row : raw.rows) cells.push_back(std::move(row[c]));
    columns.push_back(make_column(names[c], std::move(cells)));
  }
  ds.table = Table(std::move(columns));
  return ds;
}

Json column_meta_json(const ColumnMeta& m) {
  return Json{{"name", m.name},
              {"inferred_type", std::string(type_name(m.inferred_type))},
              {"missing_count", m.missing_count},
              {"cardinality", m.cardinality}};
}

Json dataset_meta_json(const Dataset& ds) {
  Json cols = Json::array();
  for (const auto& m : ds.schema()) cols.push_back(column_meta_json(m));
  return Json{{"id", ds.id},
              {"name", ds.name},
              {"format", std::string(format_name(ds.format))},
              {"row_count", ds.row_count()},
              {"column_count", ds.table.column_count()},
              {"created_at", ds.created_at},
              {"checksum", hex64(ds.checksum)},
              {"columns", cols},
              {"warnings", ds.warnings}};
}

}  // namespace deskml::data
