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

#ifndef SMB_ERROR_H_
#define SMB_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace smb {

enum class ErrorCode {
  kInvalidOutcome,
  kNoAlternative,
  kTooLarge,
  kInvalidContext,
  kProtocolViolation,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library surface as smb::Error. The code
// identifies the failure class; what() carries a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // The message without the code prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace smb

#endif  // SMB_ERROR_H_
