// Copyright 2026 The GazeGuard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEGUARD_ERROR_HPP_
#define GAZEGUARD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gazeguard {

// Numeric values double as CLI exit codes (kStaleEpoch and kLayoutMismatch
// are folded into 5 and 3 by the CLI).
enum class ErrorCode {
  kInternal = 1,
  kInvalidArgument = 2,
  kData = 3,
  kUnauthorized = 4,
  kNotFound = 5,
  kStaleEpoch = 6,
  kLayoutMismatch = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

const char* ErrorCodeName(ErrorCode code) noexcept;

}  // namespace gazeguard

#endif  // GAZEGUARD_ERROR_HPP_
