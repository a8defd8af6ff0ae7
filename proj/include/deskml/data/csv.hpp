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
#include <string_view>
#include <vector>

namespace deskml::data {

/// Untyped table as read from a payload: a header and row-major text cells.
/// Missing JSON values are represented by empty cells.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: comma delimiter, double-quote quoting with "" escapes,
/// CRLF or LF record ends, first record is the header. A UTF-8 BOM is skipped
/// and a trailing empty line is ignored.
///
/// Throws Error(kParse, "PARSE_ERROR") naming the line and record on an
/// unterminated quote, stray quote or ragged record.
RawTable parse_csv(std::string_view payload);

/// Array of flat JSON objects. Columns are the union of keys in first-seen
/// order; absent keys and nulls become missing cells. Nested values are a parse
/// error naming the record index.
RawTable parse_json_records(std::string_view payload);

/// Quotes a field when needed so parse_csv reads it back unchanged.
std::string csv_escape(std::string_view field);

}  // namespace deskml::data
