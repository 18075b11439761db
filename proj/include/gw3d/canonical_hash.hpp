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

#ifndef GW3D_CANONICAL_HASH_HPP_
#define GW3D_CANONICAL_HASH_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "gw3d/mesh.hpp"

namespace gw3d {

struct ContentHash {
  std::array<std::uint8_t, 32> digest{};

  static constexpr std::string_view kAlgorithm = "sha256-canonical-mesh-v1";

  std::string hex() const;
  static ContentHash from_hex(std::string_view hex);

  friend auto operator<=>(const ContentHash&, const ContentHash&) = default;
};

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);

// Digest of the canonical serialization: every triangle rotated so its
// lexicographically smallest corner comes first, triangles sorted by their
// nine coordinates, coordinates written as little-endian doubles. Invariant
// to triangle order and vertex numbering, not to rigid motion.
ContentHash canonical_hash(const TriangleMesh& mesh);

}  // namespace gw3d

#endif  // GW3D_CANONICAL_HASH_HPP_
