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

#include <stdexcept>
#include <string>
#include <string_view>

namespace deskml {

/// Broad failure category. Maps one-to-one onto an HTTP status at the service
/// boundary and onto a process exit code in the CLI.
enum class ErrorKind {
  kInvalidArgument,    // 400
  kNotFound,           // 404
  kConflict,           // 409
  kGone,               // 410
  kPayloadTooLarge,    // 413
  kUnauthorized,       // 401
  kUnprocessable,      // 422
  kResourceExhausted,  // 429
  kParse,              // 400, carries a position
  kUnsupported,        // 422
  kInternal,           // 500
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Stable machine-readable code, e.g. "OBJECTIVE_LIMIT".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

int http_status(ErrorKind kind) noexcept;
std::string_view kind_name(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, std::string code, const std::string& message) {
  throw Error(kind, std::move(code), message);
}

}  // namespace deskml
