// Copyright 2026 The gw3d Authors
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

#include "gw3d/error.hpp"

namespace gw3d {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyBag: return "empty_bag";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kAlreadyExists: return "already_exists";
    case ErrorCode::kGone: return "gone";
    case ErrorCode::kNoChange: return "no_change";
    case ErrorCode::kQueryTooGeneric: return "query_too_generic";
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kChecksum: return "checksum_mismatch";
    case ErrorCode::kCorrupt: return "corrupt";
    case ErrorCode::kZeroVariance: return "zero_variance";
    case ErrorCode::kNonPositiveSample: return "nonpositive_sample";
    case ErrorCode::kOverlap: return "overlap";
    case ErrorCode::kTooLarge: return "too_large";
    case ErrorCode::kStorage: return "storage_unavailable";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

namespace {

std::string with_position(const std::string& message, std::size_t position,
                          ParseError::Unit unit) {
  return message + (unit == ParseError::Unit::kByte ? " (byte " : " (line ") +
         std::to_string(position) + ")";
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t position,
                       Unit unit)
    : Error(ErrorCode::kParse, with_position(message, position, unit)),
      position_(position),
      unit_(unit) {}

}  // namespace gw3d
