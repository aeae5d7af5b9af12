// Copyright 2026 The stereoeval Authors
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

namespace stereoeval {

// Numeric values are shared with the C API status codes.
enum class ErrorCode {
  kInvalidArgument = 1,  // precondition violated by the caller
  kConfig = 3,           // bad configuration or unsupported mode for a profile
  kIo = 4,               // file could not be read or written
  kBackend = 5,          // external service failed
  kData = 7,             // malformed input record
  kUndefined = 8,        // statistic is mathematically undefined
  kUnsupported = 9,      // backend does not support the requested language
  kMismatch = 6,         // verify found differing outputs
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error InvalidArgument(const std::string& what) {
  return Error(ErrorCode::kInvalidArgument, what);
}
inline Error ConfigError(const std::string& what) {
  return Error(ErrorCode::kConfig, what);
}
inline Error IoError(const std::string& what) {
  return Error(ErrorCode::kIo, what);
}
inline Error DataError(const std::string& what) {
  return Error(ErrorCode::kData, what);
}
inline Error BackendError(const std::string& what) {
  return Error(ErrorCode::kBackend, what);
}
inline Error UndefinedError(const std::string& what) {
  return Error(ErrorCode::kUndefined, what);
}
inline Error UnsupportedLanguage(const std::string& what) {
  return Error(ErrorCode::kUnsupported, what);
}

}  // namespace stereoeval
