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

#ifndef GW3D_ERROR_HPP_
#define GW3D_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gw3d {

// Machine-readable failure categories shared by every module. The service
// layer maps them onto HTTP statuses and the CLI onto exit codes.
enum class ErrorCode {
  kParse,
  kInvalidArgument,
  kEmptyBag,
  kNotFound,
  kAlreadyExists,
  kGone,
  kNoChange,
  kQueryTooGeneric,
  kBadMagic,
  kVersionMismatch,
  kChecksum,
  kCorrupt,
  kZeroVariance,
  kNonPositiveSample,
  kOverlap,
  kTooLarge,
  kStorage,
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the byte offset (binary input) or 1-based line number
// (text input) where the problem was detected.
class ParseError : public Error {
 public:
  enum class Unit { kByte, kLine };

  ParseError(const std::string& message, std::size_t position, Unit unit);

  std::size_t position() const noexcept { return position_; }
  Unit unit() const noexcept { return unit_; }

 private:
  std::size_t position_;
  Unit unit_;
};

}  // namespace gw3d

#endif  // GW3D_ERROR_HPP_
