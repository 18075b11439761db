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

#include "gw3d/marching_cubes.hpp"

#include <cmath>
#include <unordered_map>

#include "gw3d/error.hpp"

namespace gw3d {

namespace {

constexpr std::array<std::array<int, 3>, 8> kCorners = {{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

constexpr std::array<std::array<int, 2>, 12> kEdges = {{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

// Counter-clockwise seen from outside the cube.
constexpr std::array<std::array<int, 4>, 6> kFaces = {{
    {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {3, 7, 6, 2}, {0, 4, 7, 3}, {1, 2, 6, 5},
}};

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e) {
    if ((kEdges[e][0] == a && kEdges[e][1] == b) || (kEdges[e][0] == b && kEdges[e][1] == a)) return e;
  }
  return -1;
}

std::vector<std::vector<int>> loops_for(int mask) {
  auto inside = [mask](int c) { return ((mask >> c) & 1) != 0; };
  std::array<int, 12> next;
  next.fill(-1);
  for (const auto& face : kFaces) {
    struct Crossing {
      int edge;
      bool enters;
    };
    std::vector<Crossing> crossings;
    for (int i = 0; i < 4; ++i) {
      const int a = face[i];
      const int b = face[(i + 1) % 4];
      if (inside(a) != inside(b)) crossings.push_back({edge_between(a, b), inside(b)});
    }
    const auto n = crossings.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!crossings[i].enters) continue;
      for (std::size_t j = 1; j < n; ++j) {
        const Crossing& c = crossings[(i + j) % n];
        if (!c.enters) {
          next[crossings[i].edge] = c.edge;
          break;
        }
      }
    }
  }
  std::vector<std::vector<int>> loops;
  std::array<bool, 12> used{};
  for (int start = 0; start < 12; ++start) {
    if (next[start] < 0 || used[start]) continue;
    std::vector<int> loop;
    for (int e = start; !used[e]; e = next[e]) {
      used[e] = true;
      loop.push_back(e);
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace

Vec3 GridSpec::point(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
  return {origin.x + spacing * i, origin.y + spacing * j, origin.z + spacing * k};
}

void GridSpec::validate() const {
  if (!(spacing > 0.0) || !std::isfinite(spacing) || !is_finite(origin)) {
    throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive and finite");
  }
  for (auto d : dims) {
    if (d < 2) throw Error(ErrorCode::kInvalidArgument, "grid needs at least 2 samples per axis");
  }
}

const std::array<std::vector<std::vector<int>>, 256>& marching_cubes_table() {
  static const auto table = [] {
    std::array<std::vector<std::vector<int>>, 256> t;
    for (int mask = 0; mask < 256; ++mask) t[mask] = loops_for(mask);
    return t;
  }();
  return table;
}

TriangleMesh marching_cubes(const std::vector<double>& samples, const GridSpec& grid, double iso) {
  grid.validate();
  const std::size_t nx = grid.dims[0];
  const std::size_t ny = grid.dims[1];
  const std::size_t nz = grid.dims[2];
  if (samples.size() != nx * ny * nz) throw Error(ErrorCode::kInvalidArgument, "sample count does not match grid");
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "field is not finite on the grid");
  }
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return samples[(k * ny + j) * nx + i]; };

  const auto& table = marching_cubes_table();
  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> vertex_of_edge;

  auto vertex = [&](std::size_t i, std::size_t j, std::size_t k, int edge) {
    const auto& ends = kEdges[edge];
    std::array<std::size_t, 3> a{i + kCorners[ends[0]][0], j + kCorners[ends[0]][1], k + kCorners[ends[0]][2]};
    std::array<std::size_t, 3> b{i + kCorners[ends[1]][0], j + kCorners[ends[1]][1], k + kCorners[ends[1]][2]};
    if (b < a) std::swap(a, b);
    int axis = 0;
    while (a[axis] == b[axis]) ++axis;
    const std::uint64_t key = ((static_cast<std::uint64_t>(a[2]) * ny + a[1]) * nx + a[0]) * 3 + axis;
    auto [it, fresh] = vertex_of_edge.try_emplace(key, 0);
    if (fresh) {
      const double fa = at(a[0], a[1], a[2]);
      const double fb = at(b[0], b[1], b[2]);
      const double t = (iso - fa) / (fb - fa);
      const Vec3 pa = grid.point(static_cast<std::uint32_t>(a[0]), static_cast<std::uint32_t>(a[1]), static_cast<std::uint32_t>(a[2]));
      const Vec3 pb = grid.point(static_cast<std::uint32_t>(b[0]), static_cast<std::uint32_t>(b[1]), static_cast<std::uint32_t>(b[2]));
      it->second = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.push_back(pa + t * (pb - pa));
    }
    return it->second;
  };

  for (std::size_t k = 0; k + 1 < nz; ++k) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        int mask = 0;
        for (int c = 0; c < 8; ++c) {
          if (at(i + kCorners[c][0], j + kCorners[c][1], k + kCorners[c][2]) < iso) mask |= 1 << c;
        }
        for (const auto& loop : table[mask]) {
          const std::uint32_t v0 = vertex(i, j, k, loop[0]);
          for (std::size_t n = 1; n + 1 < loop.size(); ++n) {
            mesh.triangles.push_back({v0, vertex(i, j, k, loop[n]), vertex(i, j, k, loop[n + 1])});
          }
        }
      }
    }
  }
  return mesh;
}

TriangleMesh marching_cubes(const ScalarField& field, const GridSpec& grid, double iso) {
  grid.validate();
  std::vector<double> samples;
  samples.reserve(std::size_t{grid.dims[0]} * grid.dims[1] * grid.dims[2]);
  for (std::uint32_t k = 0; k < grid.dims[2]; ++k) {
    for (std::uint32_t j = 0; j < grid.dims[1]; ++j) {
      for (std::uint32_t i = 0; i < grid.dims[0]; ++i) samples.push_back(field(grid.point(i, j, k)));
    }
  }
  return marching_cubes(samples, grid, iso);
}

double torus_field(const Vec3& p, double major, double minor) {
  const double rho = std::sqrt(p.x * p.x + p.y * p.y) - major;
  return rho * rho + p.z * p.z - minor * minor;
}

double sphere_field(const Vec3& p, const Vec3& center, double radius) {
  return norm2(p - center) - radius * radius;
}

GridSpec torus_grid(double major, double minor, int resolution, const Vec3& offset) {
  if (!(major > minor) || !(minor > 0.0) || resolution < 1) {
    throw Error(ErrorCode::kInvalidArgument, "torus needs R > r > 0 and resolution >= 1");
  }
  GridSpec g;
  g.spacing = minor / resolution;
  const double steps_xy = std::ceil((major + minor) / g.spacing) + 2;
  const double steps_z = resolution + 2;
  g.origin = {(-steps_xy + offset.x) * g.spacing, (-steps_xy + offset.y) * g.spacing, (-steps_z + offset.z) * g.spacing};
  const auto n_xy = static_cast<std::uint32_t>(2 * steps_xy + 1);
  g.dims = {n_xy, n_xy, static_cast<std::uint32_t>(2 * steps_z + 1)};
  return g;
}

}  // namespace gw3d
