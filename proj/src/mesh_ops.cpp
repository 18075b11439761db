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

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "gw3d/error.hpp"
#include "gw3d/mesh.hpp"

namespace gw3d {

Bounds TriangleMesh::bounds() const {
  Bounds b;
  for (const Vec3& v : vertices) b.extend(v);
  return b;
}

void TriangleMesh::validate() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!is_finite(vertices[i])) {
      throw Error(ErrorCode::kInvalidArgument, "vertex " + std::to_string(i) + " is not finite");
    }
  }
  const auto n = vertices.size();
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (std::uint32_t idx : triangles[t]) {
      if (idx >= n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "triangle " + std::to_string(t) + " references vertex " + std::to_string(idx));
      }
    }
  }
}

void TriangleMesh::append(const TriangleMesh& other) {
  const auto base = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  triangles.reserve(triangles.size() + other.triangles.size());
  for (const Triangle& t : other.triangles) {
    triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
}

MeshAdjacency::MeshAdjacency(const TriangleMesh& mesh) {
  const auto tri_count = static_cast<std::uint32_t>(mesh.triangles.size());
  edges_.reserve(std::size_t{tri_count} * 3);
  for (std::uint32_t t = 0; t < tri_count; ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) edges_.emplace_back(edge_key(tri[e], tri[(e + 1) % 3]), t);
  }
  std::sort(edges_.begin(), edges_.end());

  neighbors_.assign(tri_count, {kBoundary, kBoundary, kBoundary});
  for (std::size_t i = 0; i < edges_.size();) {
    std::size_t j = i;
    while (j < edges_.size() && edges_[j].first == edges_[i].first) ++j;
    if (j - i == 2 && edges_[i].second != edges_[i + 1].second) {
      const std::uint32_t t1 = edges_[i].second;
      const std::uint32_t t2 = edges_[i + 1].second;
      const std::uint64_t key = edges_[i].first;
      for (int e = 0; e < 3; ++e) {
        const Triangle& a = mesh.triangles[t1];
        if (edge_key(a[e], a[(e + 1) % 3]) == key) neighbors_[t1][e] = t2;
        const Triangle& b = mesh.triangles[t2];
        if (edge_key(b[e], b[(e + 1) % 3]) == key) neighbors_[t2][e] = t1;
      }
    }
    i = j;
  }
}

std::vector<std::uint32_t> MeshAdjacency::incident(std::uint32_t a, std::uint32_t b) const {
  const std::uint64_t key = edge_key(a, b);
  auto lo = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(key, std::uint32_t{0}));
  std::vector<std::uint32_t> out;
  for (; lo != edges_.end() && lo->first == key; ++lo) out.push_back(lo->second);
  return out;
}

std::size_t MeshAdjacency::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i == 0 || edges_[i].first != edges_[i - 1].first) ++count;
  }
  return count;
}

namespace {

struct CellHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

std::int64_t exact_key(double v) {
  if (v == 0.0) v = 0.0;  // -0 and +0 weld together
  return std::bit_cast<std::int64_t>(v);
}

}  // namespace

WeldResult weld_vertices(const TriangleMesh& mesh, double epsilon) {
  mesh.validate();
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "weld epsilon must be >= 0");

  const double cell = epsilon * mesh.bounds().diagonal();
  constexpr double kMaxCells = 4.0e18;
  auto key_of = [&](Vec3 p) -> std::array<std::int64_t, 3> {
    if (cell > 0.0) {
      const double fx = std::floor(p.x / cell), fy = std::floor(p.y / cell), fz = std::floor(p.z / cell);
      if (std::abs(fx) < kMaxCells && std::abs(fy) < kMaxCells && std::abs(fz) < kMaxCells) {
        return {static_cast<std::int64_t>(fx), static_cast<std::int64_t>(fy),
                static_cast<std::int64_t>(fz)};
      }
    }
    return {exact_key(p.x), exact_key(p.y), exact_key(p.z)};
  };

  WeldResult result;
  result.mesh.unit_hint = mesh.unit_hint;
  std::unordered_map<std::array<std::int64_t, 3>, std::uint32_t, CellHash> cells;
  cells.reserve(mesh.vertices.size());
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    auto [it, inserted] =
        cells.try_emplace(key_of(mesh.vertices[i]), static_cast<std::uint32_t>(result.mesh.vertices.size()));
    if (inserted) result.mesh.vertices.push_back(mesh.vertices[i]);
    remap[i] = it->second;
  }

  result.mesh.triangles.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& in = mesh.triangles[t];
    const Triangle out{remap[in[0]], remap[in[1]], remap[in[2]]};
    if (out[0] == out[1] || out[1] == out[2] || out[0] == out[2]) {
      result.dropped.push_back(static_cast<std::uint32_t>(t));
    } else {
      result.mesh.triangles.push_back(out);
    }
  }
  result.adjacency = MeshAdjacency(result.mesh);
  return result;
}

std::string_view to_string(DegenerateReason reason) {
  switch (reason) {
    case DegenerateReason::kRepeatedVertex: return "repeated-vertex";
    case DegenerateReason::kZeroArea: return "zero-area";
    case DegenerateReason::kSliver: return "sliver";
  }
  return "unknown";
}

std::vector<DegenerateFacet> detect_degenerate(const TriangleMesh& mesh,
                                               const DegenerateTolerances& tol) {
  const double diag = mesh.bounds().diagonal();
  const double min_area = tol.area_tol * diag * diag;
  std::vector<DegenerateFacet> out;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Triangle& t = mesh.triangles[i];
    const auto id = static_cast<std::uint32_t>(i);
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      out.push_back({id, DegenerateReason::kRepeatedVertex});
      continue;
    }
    const TriangleShape s = measure_triangle(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (!(s.area >= min_area) || s.area == 0.0) {
      out.push_back({id, DegenerateReason::kZeroArea});
    } else if (!(s.quality >= tol.quality_tol)) {
      out.push_back({id, DegenerateReason::kSliver});
    }
  }
  return out;
}

namespace {

// Order-independent sum: sorting first makes the result a function of the
// multiset of terms.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

MeshStats compute_stats(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                        const DegenerateTolerances& tol) {
  MeshStats stats;
  stats.triangle_count = mesh.triangles.size();
  stats.vertex_count = mesh.vertices.size();
  stats.bbox = mesh.bounds();

  std::vector<double> areas;
  areas.reserve(mesh.triangles.size());
  for (const Triangle& t : mesh.triangles) {
    areas.push_back(measure_triangle(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]).area);
  }
  stats.surface_area = sorted_sum(areas);

  // An edge is consistently oriented when its two triangles walk it in
  // opposite directions.
  auto direction = [&](std::uint32_t tri, std::uint64_t key) {
    const Triangle& t = mesh.triangles[tri];
    for (int e = 0; e < 3; ++e) {
      if (MeshAdjacency::edge_key(t[e], t[(e + 1) % 3]) == key) return t[e] < t[(e + 1) % 3];
    }
    return false;
  };

  bool watertight = !mesh.triangles.empty();
  bool consistent = true;
  const auto& edges = adjacency.edges();
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].first == edges[i].first) ++j;
    if (j - i != 2) {
      watertight = false;
    } else if (direction(edges[i].second, edges[i].first) ==
               direction(edges[i + 1].second, edges[i].first)) {
      consistent = false;
    }
    i = j;
  }
  stats.watertight = watertight;
  stats.consistent_normals = consistent;

  if (watertight && consistent) {
    std::vector<double> terms;
    terms.reserve(mesh.triangles.size());
    for (const Triangle& t : mesh.triangles) {
      terms.push_back(dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]])) / 6.0);
    }
    stats.volume = sorted_sum(terms);
  }

  for (const DegenerateFacet& d : detect_degenerate(mesh, tol)) stats.degenerate_facets.push_back(d.triangle);
  return stats;
}

}  // namespace gw3d
