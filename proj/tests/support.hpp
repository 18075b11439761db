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

#ifndef GW3D_TESTS_SUPPORT_HPP_
#define GW3D_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "gw3d/analysis.hpp"
#include "gw3d/generators.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/mesh_io.hpp"

namespace gw3d::test {

inline TriangleMesh tetrahedron() {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return m;
}

inline TriangleMesh single_triangle() {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  return m;
}

inline TriangleMesh unit_cube() { return make_box(Vec3{1, 1, 1}); }

// Unwelded copy: three fresh vertices per triangle, as an STL file stores it.
inline TriangleMesh soup(const TriangleMesh& m) {
  TriangleMesh out;
  for (const Triangle& t : m.triangles) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    for (std::uint32_t v : t) out.vertices.push_back(m.vertices[v]);
    out.triangles.push_back({base, base + 1, base + 2});
  }
  return out;
}

// Random triangle order, random vertex numbering, random cyclic rotation of
// each triangle (orientation preserved).
inline TriangleMesh permuted(const TriangleMesh& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> perm(m.vertices.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  TriangleMesh out;
  out.vertices.resize(m.vertices.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out.vertices[perm[i]] = m.vertices[i];
  out.triangles = m.triangles;
  std::shuffle(out.triangles.begin(), out.triangles.end(), rng);
  for (Triangle& t : out.triangles) {
    for (std::uint32_t& v : t) v = perm[v];
    std::rotate(t.begin(), t.begin() + static_cast<long>(rng() % 3), t.end());
  }
  return out;
}

inline std::vector<std::uint8_t> stl_bytes(const TriangleMesh& m) { return write_stl_binary(m); }

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gw3d-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace gw3d::test

#endif  // GW3D_TESTS_SUPPORT_HPP_
