// Copyright 2026 The smb Authors.
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

#include "smb/error.h"

namespace smb {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidOutcome:
      return "InvalidOutcome";
    case ErrorCode::kNoAlternative:
      return "NoAlternative";
    case ErrorCode::kTooLarge:
      return "TooLarge";
    case ErrorCode::kInvalidContext:
      return "InvalidContext";
    case ErrorCode::kProtocolViolation:
      return "ProtocolViolation";
    case ErrorCode::kConfigError:
      return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      message_(message) {}

}  // namespace smb
