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

#include "deskml/service/server.hpp"

#include <httplib.h>

#include <thread>

#include "deskml/common/error.hpp"
#include "deskml/common/strings.hpp"
#include "deskml/service/schemas.hpp"

namespace deskml::service {

std::pair<int, Json> error_response(const std::exception& e) {
  auto body = [](std::string_view code, std::string_view message, std::string_view kind) {
    return Json{{"error", {{"code", code}, {"message", message}, {"kind", kind}}}};
  };
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return {http_status(err->kind()), body(err->code(), err->what(), kind_name(err->kind()))};
  }
  if (dynamic_cast<const Json::parse_error*>(&e)) {
    return {400, body("INVALID_JSON", e.what(), kind_name(ErrorKind::kParse))};
  }
  if (dynamic_cast<const Json::exception*>(&e)) {
    return {400, body("INVALID_REQUEST", e.what(), kind_name(ErrorKind::kInvalidArgument))};
  }
  return {500, body("INTERNAL", e.what(), kind_name(ErrorKind::kInternal))};
}

struct HttpServer::Impl {
  Studio& studio;
  httplib::Server server;
  std::jthread thread;

  explicit Impl(Studio& s) : studio(s) { routes(); }

  static void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename Fn>
  static httplib::Server::Handler json(int status, Fn fn) {
    return [status, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        send(res, status, fn(req));
      } catch (const std::exception& e) {
        const auto [code, body] = error_response(e);
        send(res, code, body);
      }
    };
  }

  static Json body_of(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    return Json::parse(req.body);
  }

  static long long int_param(const httplib::Request& req, const char* name, long long fallback) {
    if (!req.has_param(name)) return fallback;
    const auto v = parse_number(req.get_param_value(name));
    if (!v || *v != static_cast<double>(static_cast<long long>(*v))) {
      fail(ErrorKind::kInvalidArgument, "INVALID_PARAMETER", std::string("query parameter '") + name + "' must be an integer");
    }
    return static_cast<long long>(*v);
  }

  static data::Format format_for(const std::string& filename, const std::string& content_type,
                                 const std::string& explicit_format) {
    if (!explicit_format.empty()) return data::format_from_name(explicit_format);
    const auto lower = to_lower(filename);
    if (lower.ends_with(".json") || content_type.find("json") != std::string::npos) return data::Format::kJson;
    return data::Format::kCsv;
  }

  Json upload(const httplib::Request& req) {
    const auto cap = studio.config().max_upload_bytes;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        fail(ErrorKind::kInvalidArgument, "MISSING_FILE", "multipart upload needs a 'file' part");
      }
      const auto file = req.get_file_value("file");
      if (file.content.size() > cap) {
        fail(ErrorKind::kPayloadTooLarge, "PAYLOAD_TOO_LARGE",
             "upload of " + std::to_string(file.content.size()) + " bytes exceeds the limit of " + std::to_string(cap));
      }
      const auto explicit_format = req.has_file("format") ? req.get_file_value("format").content : "";
      std::string name = req.has_file("name") ? req.get_file_value("name").content : file.filename;
      if (name.empty()) name = "dataset";
      return studio.upload_dataset(file.content, format_for(file.filename, file.content_type, explicit_format),
                                   std::move(name));
    }
    const auto type = req.get_header_value("Content-Type");
    const auto name = req.has_param("name") ? req.get_param_value("name") : std::string("dataset");
    const auto explicit_format = req.has_param("format") ? req.get_param_value("format") : "";
    return studio.upload_dataset(req.body, format_for(name, type, explicit_format), name);
  }

  void routes() {
    auto& s = server;
    const auto cap = studio.config().max_upload_bytes;
    s.set_payload_max_length(cap + (1u << 20));

    const std::string key = studio.config().api_key;
    s.set_pre_routing_handler([key](const httplib::Request& req, httplib::Response& res) {
      if (key.empty() || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
      std::string given = req.get_header_value("X-API-Key");
      const auto auth = req.get_header_value("Authorization");
      if (given.empty() && auth.starts_with("Bearer ")) given = auth.substr(7);
      if (given == key) return httplib::Server::HandlerResponse::Unhandled;
      send(res, 401, {{"error", {{"code", "UNAUTHORIZED"}, {"message", "missing or wrong API key"},
                                 {"kind", kind_name(ErrorKind::kUnauthorized)}}}});
      return httplib::Server::HandlerResponse::Handled;
    });

    s.Get("/health", json(200, [](const auto&) { return Json{{"status", "ok"}}; }));
    s.Get("/schemas", json(200, [](const auto&) { return schema_index(); }));
    s.Get(R"(/schemas/([A-Za-z0-9_]+))", json(200, [](const auto& r) { return schema(r.matches[1]); }));

    s.Post("/datasets", json(201, [this](const auto& r) { return upload(r); }));
    s.Get("/datasets", json(200, [this](const auto&) { return studio.list_datasets(); }));
    s.Get(R"(/datasets/([^/]+))", json(200, [this](const auto& r) { return studio.dataset(r.matches[1]); }));
    s.Get(R"(/datasets/([^/]+)/profile)",
          json(200, [this](const auto& r) { return studio.dataset_profile(r.matches[1]); }));
    s.Get(R"(/datasets/([^/]+)/correlations)",
          json(200, [this](const auto& r) { return studio.dataset_correlations(r.matches[1]); }));
    s.Get(R"(/datasets/([^/]+)/rows)", json(200, [this](const auto& r) {
            return studio.dataset_rows(r.matches[1], static_cast<long>(int_param(r, "offset", 0)),
                                       static_cast<long>(int_param(r, "limit", 50)));
          }));

    s.Post("/trials", json(201, [this](const auto& r) { return studio.create_trial(body_of(r)); }));
    s.Get("/trials", json(200, [this](const auto&) { return studio.list_trials(); }));
    s.Get(R"(/trials/([^/]+))", json(200, [this](const auto& r) { return studio.trial(r.matches[1]); }));
    s.Get(R"(/trials/([^/]+)/events)", json(200, [this](const auto& r) {
            return studio.trial_events(r.matches[1], int_param(r, "after", 0));
          }));
    s.Post(R"(/trials/([^/]+)/cancel)", json(200, [this](const auto& r) { return studio.cancel_trial(r.matches[1]); }));
    s.Get(R"(/trials/([^/]+)/front)", json(200, [this](const auto& r) { return studio.trial_front(r.matches[1]); }));

    s.Get(R"(/models/([^/]+))", json(200, [this](const auto& r) { return studio.model(r.matches[1]); }));
    s.Get(R"(/models/([^/]+)/report)", json(200, [this](const auto& r) {
            return studio.model_report(r.matches[1], r.has_param("split") ? r.get_param_value("split") : "test");
          }));
    s.Get(R"(/models/([^/]+)/code)", json(200, [this](const auto& r) {
            const auto dialect = r.has_param("dialect") ? r.get_param_value("dialect") : "portable_c";
            const bool bench = r.has_param("benchmark") && r.get_param_value("benchmark") == "true";
            return studio.model_code(r.matches[1], dialect, bench);
          }));
    s.Post(R"(/models/([^/]+)/deploy)", json(201, [this](const auto& r) { return studio.deploy(r.matches[1]); }));

    s.Get("/deployments", json(200, [this](const auto&) { return studio.list_deployments(); }));
    s.Get(R"(/deployments/([^/]+))", json(200, [this](const auto& r) { return studio.deployment(r.matches[1]); }));
    s.Post(R"(/deployments/([^/]+)/predict)",
           json(200, [this](const auto& r) { return studio.predict(r.matches[1], body_of(r)); }));
    s.Post(R"(/deployments/([^/]+)/retire)", json(200, [this](const auto& r) { return studio.retire(r.matches[1]); }));

    if (!studio.config().static_dir.empty()) s.set_mount_point("/", studio.config().static_dir.string());

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string code = res.status == 404 ? "ROUTE_NOT_FOUND" : res.status == 413 ? "PAYLOAD_TOO_LARGE" : "HTTP_ERROR";
      send(res, res.status, {{"error", {{"code", code}, {"message", req.method + " " + req.path + " failed"},
                                        {"kind", res.status == 404 ? "not_found" : "invalid_argument"}}}});
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        const auto [code, body] = error_response(e);
        send(res, code, body);
      } catch (...) {
        send(res, 500, {{"error", {{"code", "INTERNAL"}, {"message", "unknown error"}, {"kind", "internal"}}}});
      }
    });
  }
};

HttpServer::HttpServer(Studio& studio) : impl_(std::make_unique<Impl>(studio)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorKind::kInternal, "BIND_FAILED", "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

int HttpServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->thread = std::jthread([this] { listen(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace deskml::service
