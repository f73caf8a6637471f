/*
   Copyright 2026 The rmtratio Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmtratio {

enum class ErrorCode {
  InvalidArgument,
  DegenerateSpacing,
  InsufficientLevels,
  TooFewLevels,
  BadEdges,
  DomainError,
  QuadratureNonconvergence,
  OptimizerNonconvergence,
  EmptySeries,
  InsufficientTailSamples,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateSpacing: return "DegenerateSpacing";
    case ErrorCode::InsufficientLevels: return "InsufficientLevels";
    case ErrorCode::TooFewLevels: return "TooFewLevels";
    case ErrorCode::BadEdges: return "BadEdges";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::QuadratureNonconvergence: return "QuadratureNonconvergence";
    case ErrorCode::OptimizerNonconvergence: return "OptimizerNonconvergence";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InsufficientTailSamples: return "InsufficientTailSamples";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace rmtratio
