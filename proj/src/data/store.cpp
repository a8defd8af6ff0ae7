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

#include "deskml/data/store.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "deskml/common/error.hpp"
#include "deskml/common/files.hpp"

namespace deskml::data {

namespace fs = std::filesystem;

namespace {

std::string format_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ds-%06zu", n);
  return buf;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) fail(ErrorKind::kInternal, "CORRUPT_BLOB", "truncated column blob");
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

}  // namespace

void write_column_blob(const fs::path& path, const std::vector<std::string>& cells) {
  std::string out;
  put<std::uint64_t>(out, cells.size());
  for (const auto& c : cells) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.size()));
    out += c;
  }
  write_file_atomic(path, out);
}

std::vector<std::string> read_column_blob(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::string_view in(bytes);
  const auto n = take<std::uint64_t>(in);
  std::vector<std::string> cells;
  cells.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = take<std::uint32_t>(in);
    if (in.size() < len) fail(ErrorKind::kInternal, "CORRUPT_BLOB", "truncated cell in " + path.string());
    cells.emplace_back(in.substr(0, len));
    in.remove_prefix(len);
  }
  return cells;
}

DatasetStore::DatasetStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

std::shared_ptr<const Dataset> DatasetStore::add(Dataset ds) {
  std::lock_guard lock(mu_);
  ds.id = format_id(next_id_++);
  const fs::path dir = root_ / ds.id;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < ds.table.column_count(); ++i) {
    write_column_blob(dir / ("col_" + std::to_string(i) + ".bin"), ds.table.column(i).cells);
  }
  write_file_atomic(dir / "dataset.meta.json", dataset_meta_json(ds).dump(2));
  auto stored = std::make_shared<const Dataset>(std::move(ds));
  items_.push_back(stored);
  return stored;
}

std::shared_ptr<const Dataset> DatasetStore::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  for (const auto& d : items_) {
    if (d->id == id) return d;
  }
  fail(ErrorKind::kNotFound, "DATASET_NOT_FOUND", "no dataset with id '" + id + "'");
}

std::vector<std::shared_ptr<const Dataset>> DatasetStore::list() const {
  std::lock_guard lock(mu_);
  return items_;
}

void DatasetStore::load_all() {
  std::lock_guard lock(mu_);
  items_.clear();
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "dataset.meta.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const Json meta = Json::parse(read_file(dir / "dataset.meta.json"));
    Dataset ds;
    ds.id = meta.at("id").get<std::string>();
    ds.name = meta.at("name").get<std::string>();
    ds.format = format_from_name(meta.at("format").get<std::string>());
    ds.created_at = meta.at("created_at").get<std::string>();
    ds.checksum = std::stoull(meta.at("checksum").get<std::string>(), nullptr, 16);
    ds.warnings = meta.at("warnings").get<std::vector<std::string>>();
    std::vector<Column> cols;
    const auto& cmeta = meta.at("columns");
    for (std::size_t i = 0; i < cmeta.size(); ++i) {
      auto cells = read_column_blob(dir / ("col_" + std::to_string(i) + ".bin"));
      cols.push_back(make_column(cmeta[i].at("name").get<std::string>(), std::move(cells),
                                 type_from_name(cmeta[i].at("inferred_type").get<std::string>())));
    }
    ds.table = Table(std::move(cols));
    const auto num = std::stoull(ds.id.substr(3));
    next_id_ = std::max<std::size_t>(next_id_, num + 1);
    items_.push_back(std::make_shared<const Dataset>(std::move(ds)));
  }
}

}  // namespace deskml::data
