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

#include "deskml/common/error.hpp"

namespace deskml {

int http_status(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kParse:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
      return 409;
    case ErrorKind::kGone:
      return 410;
    case ErrorKind::kPayloadTooLarge:
      return 413;
    case ErrorKind::kUnauthorized:
      return 401;
    case ErrorKind::kUnprocessable:
    case ErrorKind::kUnsupported:
      return 422;
    case ErrorKind::kResourceExhausted:
      return 429;
    case ErrorKind::kInternal:
      break;
  }
  return 500;
}

std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kGone: return "gone";
    case ErrorKind::kPayloadTooLarge: return "payload_too_large";
    case ErrorKind::kUnauthorized: return "unauthorized";
    case ErrorKind::kUnprocessable: return "unprocessable";
    case ErrorKind::kResourceExhausted: return "resource_exhausted";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kInternal: return "internal";
  }
  return "internal";
}

}  // namespace deskml
