/*
 * Copyright 2026 The signpose Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace signpose {

enum class ErrorCode {
  kInvalidArgument,
  kEmptySequence,
  kAllFramesTrimmed,
  kMissingShoulders,
  kDegenerateShoulders,
  kNoWristData,
  kLayoutMismatch,
  kShapeMismatch,
  kEmptyTrajectory,
  kNotNormalized,
  kEmptyUsedSet,
  kInvalidT,
  kInvalidLength,
  kInsufficientSamples,
  kPoolTooSmall,
  kUnknownLanguage,
  kParseError,
  kMultiplePersons,
  kVersionMismatch,
  kTruncatedFile,
  kIoError,
  kDuplicateId,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; `code()` lets
// callers (the CLI in particular) classify the failure without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kAllFramesTrimmed: return "AllFramesTrimmed";
    case ErrorCode::kMissingShoulders: return "MissingShoulders";
    case ErrorCode::kDegenerateShoulders: return "DegenerateShoulders";
    case ErrorCode::kNoWristData: return "NoWristData";
    case ErrorCode::kLayoutMismatch: return "LayoutMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kEmptyUsedSet: return "EmptyUsedSet";
    case ErrorCode::kInvalidT: return "InvalidT";
    case ErrorCode::kInvalidLength: return "InvalidLength";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kPoolTooSmall: return "PoolTooSmall";
    case ErrorCode::kUnknownLanguage: return "UnknownLanguage";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMultiplePersons: return "MultiplePersons";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
  }
  return "Unknown";
}

}  // namespace signpose
