// Copyright 2026 The esdlab Authors
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

namespace esdlab {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  NotHermitian,
  NoConvergence,
  NotPSD,
  InvariantViolation,
  StrengthOutOfRange,
  OutOfRange,
  NotTracePreserving,
  NotCompletelyPositive,
  RankDeficient,
  RankDeficientDesign,
  ParseError,
  IOError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::StrengthOutOfRange: return "StrengthOutOfRange";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotTracePreserving: return "NotTracePreserving";
    case ErrorCode::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace esdlab
