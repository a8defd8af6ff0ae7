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

#include "deskml/data/csv.hpp"

#include <unordered_map>

#include "deskml/common/error.hpp"
#include "deskml/common/json.hpp"
#include "deskml/common/strings.hpp"

namespace deskml::data {

namespace {

[[noreturn]] void parse_error(std::size_t line, std::size_t record, const std::string& what) {
  fail(ErrorKind::kParse, "PARSE_ERROR",
       "line " + std::to_string(line) + ", record " + std::to_string(record) + ": " + what);
}

}  // namespace

RawTable parse_csv(std::string_view in) {
  if (in.size() >= 3 && static_cast<unsigned char>(in[0]) == 0xEF &&
      static_cast<unsigned char>(in[1]) == 0xBB && static_cast<unsigned char>(in[2]) == 0xBF) {
    in.remove_prefix(3);
  }

  RawTable out;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_start_line = 1;
  std::size_t record_index = 0;  // 0 = header
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool after_quote = false;

  auto end_field = [&] {
    record.push_back(field_was_quoted ? field : std::string(trim(field)));
    field.clear();
    field_was_quoted = false;
    after_quote = false;
  };
  auto end_record = [&] {
    const bool blank = record.empty() && trim(field).empty() && !field_was_quoted;
    end_field();
    if (record_index == 0) {
      out.header = std::move(record);
    } else if (!blank) {
      if (record.size() != out.header.size()) {
        parse_error(record_start_line, record_index,
                    "expected " + std::to_string(out.header.size()) + " fields, found " +
                        std::to_string(record.size()));
      }
      out.rows.push_back(std::move(record));
    } else {
      --record_index;
    }
    record.clear();
    ++record_index;
    record_start_line = line;
  };

  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < in.size() && in[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (after_quote || !trim(field).empty()) parse_error(line, record_index, "unexpected quote inside field");
        field.clear();
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        if (after_quote && c != ' ' && c != '\t') parse_error(line, record_index, "characters after closing quote");
        if (!after_quote) field.push_back(c);
        break;
    }
  }
  if (in_quotes) parse_error(record_start_line, record_index, "unterminated quoted field");
  if (!field.empty() || !record.empty() || field_was_quoted) end_record();
  return out;
}

RawTable parse_json_records(std::string_view payload) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(payload);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    fail(ErrorKind::kParse, "PARSE_ERROR", std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_array()) fail(ErrorKind::kParse, "PARSE_ERROR", "expected a JSON array of objects");

  RawTable out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const auto& obj = doc[r];
    if (!obj.is_object()) fail(ErrorKind::kParse, "PARSE_ERROR", "record " + std::to_string(r) + ": not an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!index.contains(it.key())) {
        index.emplace(it.key(), out.header.size());
        out.header.push_back(it.key());
      }
    }
  }
  out.rows.reserve(doc.size());
  for (std::size_t r = 0; r < doc.size(); ++r) {
    std::vector<std::string> row(out.header.size());
    for (auto it = doc[r].begin(); it != doc[r].end(); ++it) {
      const auto& v = it.value();
      std::string& cell = row[index.at(it.key())];
      if (v.is_null()) {
        cell.clear();
      } else if (v.is_string()) {
        cell = std::string(trim(v.get_ref<const std::string&>()));
      } else if (v.is_boolean()) {
        cell = v.get<bool>() ? "true" : "false";
      } else if (v.is_number_integer()) {
        cell = v.dump();
      } else if (v.is_number()) {
        cell = format_number(v.get<double>());
      } else {
        fail(ErrorKind::kParse, "PARSE_ERROR",
             "record " + std::to_string(r) + ", key '" + it.key() + "': nested values are not supported");
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string csv_escape(std::string_view field) {
  const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                     (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace deskml::data
