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

#include "deskml/service/config.hpp"

#include <cmath>
#include <cstdlib>

#include "deskml/common/error.hpp"
#include "deskml/common/files.hpp"
#include "deskml/common/strings.hpp"

namespace deskml::service {

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::kInvalidArgument, "INVALID_CONFIG", msg); }

std::size_t count_of(const Json& v, const std::string& key, std::size_t lo) {
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(lo)) {
    bad("'" + key + "' must be an integer >= " + std::to_string(lo));
  }
  return v.get<std::size_t>();
}

double positive(const Json& v, const std::string& key, bool allow_zero) {
  if (!v.is_number()) bad("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!(allow_zero ? x >= 0.0 : x > 0.0) || !std::isfinite(x)) bad("'" + key + "' is out of range");
  return x;
}

void check(const ServiceConfig& c) {
  if (c.port < 0 || c.port > 65535) bad("port must be in [0, 65535]");
  if (c.max_running < 1) bad("max_running must be at least 1");
  if (c.data_dir.empty()) bad("data_dir must not be empty");
}

}  // namespace

ServiceConfig service_config_from_json(const Json& j, ServiceConfig c) {
  if (!j.is_object()) bad("service config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "data_dir" || key == "host" || key == "api_key" || key == "static_dir") {
      if (!v.is_string()) bad("'" + key + "' must be a string");
      const auto s = v.get<std::string>();
      if (key == "data_dir") c.data_dir = s;
      else if (key == "host") c.host = s;
      else if (key == "api_key") c.api_key = s;
      else c.static_dir = s;
    } else if (key == "port") {
      c.port = static_cast<int>(count_of(v, key, 0));
    } else if (key == "power_watts") {
      c.power.power_watts = positive(v, key, false);
    } else if (key == "grid_intensity_kg_per_kwh") {
      c.power.grid_intensity_kg_per_kwh = positive(v, key, true);
    } else if (key == "max_running") {
      c.max_running = count_of(v, key, 1);
    } else if (key == "max_queue") {
      c.max_queue = count_of(v, key, 0);
    } else if (key == "max_upload_bytes") {
      c.max_upload_bytes = count_of(v, key, 1);
    } else if (key == "trial_workers") {
      c.trial_workers = count_of(v, key, 0);
    } else {
      bad("unknown service config key '" + key + "'");
    }
  }
  check(c);
  return c;
}

ServiceConfig apply_environment(ServiceConfig c, const EnvLookup& env) {
  Json j = Json::object();
  auto text = [&](const char* var, const char* key) {
    if (auto v = env(var)) j[key] = *v;
  };
  auto number = [&](const char* var, const char* key, bool integral) {
    auto v = env(var);
    if (!v) return;
    const auto x = parse_number(*v);
    if (!x) bad(std::string(var) + " must be numeric, got '" + *v + "'");
    if (integral) {
      if (*x != std::floor(*x)) bad(std::string(var) + " must be an integer");
      j[key] = static_cast<long long>(*x);
    } else {
      j[key] = *x;
    }
  };
  text("DESKML_DATA_DIR", "data_dir");
  text("DESKML_HOST", "host");
  text("DESKML_API_KEY", "api_key");
  text("DESKML_STATIC_DIR", "static_dir");
  number("DESKML_PORT", "port", true);
  number("DESKML_POWER_WATTS", "power_watts", false);
  number("DESKML_GRID_INTENSITY", "grid_intensity_kg_per_kwh", false);
  number("DESKML_MAX_RUNNING", "max_running", true);
  number("DESKML_MAX_QUEUE", "max_queue", true);
  number("DESKML_MAX_UPLOAD_BYTES", "max_upload_bytes", true);
  number("DESKML_TRIAL_WORKERS", "trial_workers", true);
  return service_config_from_json(j, std::move(c));
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig c;
  if (file) {
    Json j;
    try {
      j = Json::parse(read_file(*file));
    } catch (const Json::exception& e) {
      bad("cannot parse " + file->string() + ": " + e.what());
    }
    c = service_config_from_json(j, c);
  }
  return apply_environment(std::move(c), process_environment());
}

Json to_json(const ServiceConfig& c) {
  return {{"data_dir", c.data_dir.string()},
          {"host", c.host},
          {"port", c.port},
          {"power_watts", c.power.power_watts},
          {"grid_intensity_kg_per_kwh", c.power.grid_intensity_kg_per_kwh},
          {"max_running", c.max_running},
          {"max_queue", c.max_queue},
          {"max_upload_bytes", c.max_upload_bytes},
          {"trial_workers", c.trial_workers},
          {"api_key", c.api_key.empty() ? Json(nullptr) : Json("***")},
          {"static_dir", c.static_dir.string()}};
}

}  // namespace deskml::service
