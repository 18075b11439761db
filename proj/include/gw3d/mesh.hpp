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

#ifndef GW3D_MESH_HPP_
#define GW3D_MESH_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gw3d/geometry.hpp"

namespace gw3d {

using Triangle = std::array<std::uint32_t, 3>;

inline constexpr std::uint32_t kBoundary = std::numeric_limits<std::uint32_t>::max();

// Indexed triangle soup. Triangle vertex order carries orientation.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::optional<std::string> unit_hint;

  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;

  Bounds bounds() const;

  // Throws Error(kInvalidArgument) on out-of-range indices or non-finite
  // coordinates.
  void validate() const;

  // Appends `other` as a disjoint component.
  void append(const TriangleMesh& other);
};

// Edge incidence for a welded mesh. Edge e of triangle t joins
// vertices t[e] and t[(e + 1) % 3].
class MeshAdjacency {
 public:
  MeshAdjacency() = default;
  explicit MeshAdjacency(const TriangleMesh& mesh);

  static std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t{a} << 32) | b;
  }

  // Triangles incident to the unordered edge {a, b}, ascending.
  std::vector<std::uint32_t> incident(std::uint32_t a, std::uint32_t b) const;

  // Neighbor across each edge, kBoundary when the edge does not have exactly
  // two incident triangles.
  const std::vector<std::array<std::uint32_t, 3>>& neighbors() const { return neighbors_; }

  // (edge key, triangle id) pairs sorted by key then triangle.
  const std::vector<std::pair<std::uint64_t, std::uint32_t>>& edges() const { return edges_; }

  std::size_t edge_count() const;

  friend bool operator==(const MeshAdjacency&, const MeshAdjacency&) = default;

 private:
  std::vector<std::pair<std::uint64_t, std::uint32_t>> edges_;
  std::vector<std::array<std::uint32_t, 3>> neighbors_;
};

enum class DegenerateReason { kRepeatedVertex, kZeroArea, kSliver };

struct DegenerateFacet {
  std::uint32_t triangle = 0;
  DegenerateReason reason = DegenerateReason::kRepeatedVertex;

  friend bool operator==(const DegenerateFacet&, const DegenerateFacet&) = default;
};

std::string_view to_string(DegenerateReason reason);

struct DegenerateTolerances {
  double area_tol = 1e-12;     // relative to (bbox diagonal)^2
  double quality_tol = 1e-4;   // absolute

  friend bool operator==(const DegenerateTolerances&, const DegenerateTolerances&) = default;
};

struct MeshStats {
  std::size_t triangle_count = 0;
  std::size_t vertex_count = 0;
  double surface_area = 0.0;
  Bounds bbox;
  bool watertight = false;
  bool consistent_normals = false;
  std::vector<std::uint32_t> degenerate_facets;
  std::optional<double> volume;  // only when watertight and consistent

  friend bool operator==(const MeshStats&, const MeshStats&) = default;
};

struct WeldResult {
  TriangleMesh mesh;
  MeshAdjacency adjacency;
  std::vector<std::uint32_t> dropped;  // input triangle ids that collapsed
};

// Merges vertices that snap to the same lattice cell of size
// epsilon * bbox diagonal (bitwise-equal points when that size is 0). The
// first vertex seen in a cell is kept verbatim as its representative.
WeldResult weld_vertices(const TriangleMesh& mesh, double epsilon);

MeshStats compute_stats(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                        const DegenerateTolerances& tol = {});

std::vector<DegenerateFacet> detect_degenerate(const TriangleMesh& mesh,
                                               const DegenerateTolerances& tol = {});

}  // namespace gw3d

#endif  // GW3D_MESH_HPP_
