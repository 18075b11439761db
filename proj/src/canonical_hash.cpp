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

#include "gw3d/canonical_hash.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <memory>

#include "gw3d/error.hpp"

namespace gw3d {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, 32> out{};
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw Error(ErrorCode::kInternal, "sha256 failed");
  }
  return out;
}

std::string ContentHash::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (std::uint8_t b : digest) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

ContentHash ContentHash::from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() != 64) throw Error(ErrorCode::kInvalidArgument, "content hash must be 64 hex digits");
  ContentHash h;
  for (std::size_t i = 0; i < 32; ++i) {
    const int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kInvalidArgument, "bad hex digit in content hash");
    h.digest[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return h;
}

ContentHash canonical_hash(const TriangleMesh& mesh) {
  mesh.validate();
  using Corners = std::array<Vec3, 3>;
  std::vector<Corners> tris;
  tris.reserve(mesh.triangles.size());
  for (const Triangle& t : mesh.triangles) {
    Corners c{mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    for (Vec3& v : c) {
      // -0.0 serializes like +0.0
      v.x += 0.0;
      v.y += 0.0;
      v.z += 0.0;
    }
    int first = 0;
    for (int i = 1; i < 3; ++i) {
      if (lex_less(c[i], c[first])) first = i;
    }
    std::rotate(c.begin(), c.begin() + first, c.end());
    tris.push_back(c);
  }
  std::sort(tris.begin(), tris.end(), [](const Corners& a, const Corners& b) {
    for (int i = 0; i < 3; ++i) {
      if (a[i] != b[i]) return lex_less(a[i], b[i]);
    }
    return false;
  });

  std::vector<std::uint8_t> buf;
  buf.reserve(tris.size() * 9 * 8);
  for (const Corners& c : tris) {
    for (const Vec3& v : c) {
      for (double d : {v.x, v.y, v.z}) {
        const auto bits = std::bit_cast<std::uint64_t>(d);
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
      }
    }
  }
  return ContentHash{sha256(buf)};
}

}  // namespace gw3d
