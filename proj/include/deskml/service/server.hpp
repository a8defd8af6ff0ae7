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

#include <memory>
#include <string>
#include <utility>

#include "deskml/common/json.hpp"
#include "deskml/service/studio.hpp"

namespace deskml::service {

/// {status, {"error": {"code", "message", "kind"}}} for a thrown exception.
std::pair<int, Json> error_response(const std::exception& e);

/// HTTP/1.1 + JSON front end over a Studio.
class HttpServer {
 public:
  explicit HttpServer(Studio& studio);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the port.
  /// Errors: kInternal "BIND_FAILED".
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  /// bind() + listen() on a background thread; returns the port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace deskml::service
