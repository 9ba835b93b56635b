// Copyright 2026 The jointsparse Authors. All Rights Reserved.
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

#ifndef JOINTSPARSE_ERRORS_HPP
#define JOINTSPARSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jointsparse {

enum class ErrorCode {
  ZeroSignal,
  BadSparsity,
  SingleColumn,
  ZeroOnSupport,
  DimensionMismatch,
  DegenerateDenominator,
  EmptyMask,
  TooSmall,
  Exhausted,
  SizeMismatch,
  ParseError,
  ConfigError,
  MissingDictionary,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::BadSparsity: return "BadSparsity";
    case ErrorCode::SingleColumn: return "SingleColumn";
    case ErrorCode::ZeroOnSupport: return "ZeroOnSupport";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingDictionary: return "MissingDictionary";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace jointsparse

#endif  // JOINTSPARSE_ERRORS_HPP
