// Copyright 2026 The Feintsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEINT_ERROR_H_
#define FEINT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace feint {

// Every failure raised by the library carries one of these codes. The values
// are mirrored one-to-one by the FEINT_ERR_* constants of the C API.
enum class ErrorCode {
  kParse = 1,
  kValidation,
  kDimension,
  kEmptySequence,
  kCutOutOfRange,
  kNotSimilar,
  kRewardLeak,
  kUnknownAction,
  kInvalidWindow,
  kWindowMismatch,
  kUnsupportedState,
  kEvaluationFailure,
  kUnboundedGame,
  kEmptyPool,
  kConfig,
  kUnknownAgent,
  kIllegalAction,
  kSnapshotFailure,
  kIo,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace feint

#endif  // FEINT_ERROR_H_
