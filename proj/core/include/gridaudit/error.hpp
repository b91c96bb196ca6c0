// Copyright 2026 The GridAudit Authors.
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

#ifndef GRIDAUDIT_ERROR_HPP_
#define GRIDAUDIT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gridaudit {

// Every failure the library reports carries one of these codes. The CLI maps
// them onto exit codes; tests match on them instead of message text.
enum class ErrorCode {
  kMalformedDocument,
  kInvalidAddress,
  kInvalidCell,
  kDuplicateSheet,
  kDanglingOutput,
  kSyntaxError,
  kUnknownFunction,
  kUnknownName,
  kExplosionCap,
  kNoDeclaredOutputs,
  kOutputIsError,
  kMissingInputCell,
  kInvalidTeamSize,
  kModuleMismatch,
  kEmptyTruth,
  kInvalidConfig,
  kInvalidArgument,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Formula errors additionally know where in the source text they happened.
class FormulaError : public Error {
 public:
  FormulaError(ErrorCode code, const std::string& message, std::size_t offset)
      : Error(code, message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace gridaudit

#endif  // GRIDAUDIT_ERROR_HPP_
