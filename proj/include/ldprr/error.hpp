// Copyright 2026 The ldprr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPRR_ERROR_HPP_
#define LDPRR_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldprr {

enum class ErrorCode {
  kInvalidArgument,
  kNegativeEntry,
  kSumNotOne,
  kLengthMismatch,
  kSupportMismatch,
  kSingularMatrix,
  kNotStochastic,
  kNotAPermutation,
  kRetriesExhausted,
  kUnsupportedSpec,
  kNegativeVariance,
  kDegenerateSource,
  kConvergenceFailure,
  kOutOfAlphabet,
  kInvalidP0,
  kAllZeroType,
  kTrialFailure,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure in the library surfaces as an ldprr::Error carrying a code,
// so callers (notably the CLI) can map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNegativeEntry: return "NegativeEntry";
    case ErrorCode::kSumNotOne: return "SumNotOne";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kNotStochastic: return "NotStochastic";
    case ErrorCode::kNotAPermutation: return "NotAPermutation";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kUnsupportedSpec: return "UnsupportedSpec";
    case ErrorCode::kNegativeVariance: return "NegativeVariance";
    case ErrorCode::kDegenerateSource: return "DegenerateSource";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kOutOfAlphabet: return "OutOfAlphabet";
    case ErrorCode::kInvalidP0: return "InvalidP0";
    case ErrorCode::kAllZeroType: return "AllZeroType";
    case ErrorCode::kTrialFailure: return "TrialFailure";
  }
  return "Unknown";
}

}  // namespace ldprr

#endif  // LDPRR_ERROR_HPP_
