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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "deskml/common/json.hpp"
#include "deskml/eval/green.hpp"

namespace deskml::service {

struct ServiceConfig {
  std::filesystem::path data_dir = "deskml-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  eval::PowerConfig power;
  std::size_t max_running = 1;        // trials executing at once
  std::size_t max_queue = 16;         // trials waiting to run
  std::size_t max_upload_bytes = 64u << 20;
  std::size_t trial_workers = 0;      // default evaluation threads per trial; 0 = hardware
  std::string api_key;                // empty = no authentication
  std::filesystem::path static_dir;   // optional web assets served at /
};

/// Recognised keys: data_dir, host, port, power_watts,
/// grid_intensity_kg_per_kwh, max_running, max_queue, max_upload_bytes,
/// trial_workers, api_key, static_dir.
/// Errors: kInvalidArgument "INVALID_CONFIG" for unknown keys or bad values.
ServiceConfig service_config_from_json(const Json& j, ServiceConfig base = {});

/// Environment overrides: DESKML_DATA_DIR, DESKML_HOST, DESKML_PORT,
/// DESKML_POWER_WATTS, DESKML_GRID_INTENSITY, DESKML_MAX_RUNNING,
/// DESKML_MAX_QUEUE, DESKML_MAX_UPLOAD_BYTES, DESKML_TRIAL_WORKERS,
/// DESKML_API_KEY, DESKML_STATIC_DIR.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
ServiceConfig apply_environment(ServiceConfig c, const EnvLookup& env);

/// Defaults, then the JSON file (if any), then the process environment.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file);

EnvLookup process_environment();

/// The api key is redacted.
Json to_json(const ServiceConfig& c);

}  // namespace deskml::service
