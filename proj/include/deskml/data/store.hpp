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

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "deskml/data/dataset.hpp"

namespace deskml::data {

/// Persists datasets under <root>/<id>/ as dataset.meta.json plus one binary
/// blob per column (col_<index>.bin: u64 cell count, then u32 length + bytes
/// per cell). Datasets are immutable once added; readers share them freely.
class DatasetStore {
 public:
  explicit DatasetStore(std::filesystem::path root);

  /// Assigns the next id ("ds-000001", ...), writes the files and returns the
  /// stored snapshot.
  std::shared_ptr<const Dataset> add(Dataset ds);

  /// Throws Error(kNotFound, "DATASET_NOT_FOUND").
  std::shared_ptr<const Dataset> get(const std::string& id) const;
  std::vector<std::shared_ptr<const Dataset>> list() const;

  /// Reads every dataset directory under the root.
  void load_all();

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<const Dataset>> items_;
  std::size_t next_id_ = 1;
};

void write_column_blob(const std::filesystem::path& path, const std::vector<std::string>& cells);
std::vector<std::string> read_column_blob(const std::filesystem::path& path);

}  // namespace deskml::data
