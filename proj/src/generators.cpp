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

#include "gw3d/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "gw3d/error.hpp"
#include "gw3d/marching_cubes.hpp"

namespace gw3d {

double snap_dyadic(double v, int bits) { return std::ldexp(std::nearbyint(std::ldexp(v, bits)), -bits); }

Vec3 snap_dyadic(const Vec3& v, int bits) {
  return {snap_dyadic(v.x, bits), snap_dyadic(v.y, bits), snap_dyadic(v.z, bits)};
}

void snap_dyadic(TriangleMesh& mesh, int bits) {
  for (Vec3& v : mesh.vertices) v = snap_dyadic(v, bits);
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  if (!(hi.x > lo.x && hi.y > lo.y && hi.z > lo.z)) throw Error(ErrorCode::kInvalidArgument, "box needs positive extent");
  TriangleMesh m;
  for (int c = 0; c < 8; ++c) {
    const bool x = c == 1 || c == 2 || c == 5 || c == 6;
    const bool y = c == 2 || c == 3 || c == 6 || c == 7;
    m.vertices.push_back({x ? hi.x : lo.x, y ? hi.y : lo.y, c >= 4 ? hi.z : lo.z});
  }
  constexpr std::array<std::array<std::uint32_t, 4>, 6> kFaces = {{
      {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {3, 7, 6, 2}, {0, 4, 7, 3}, {1, 2, 6, 5},
  }};
  for (const auto& f : kFaces) {
    m.triangles.push_back({f[0], f[1], f[2]});
    m.triangles.push_back({f[0], f[2], f[3]});
  }
  return m;
}

TriangleMesh make_box(const Vec3& size) { return make_box(Vec3{}, size); }

TriangleMesh make_prism(int sides, double radius, double height) {
  if (sides < 3 || !(radius > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prism needs >= 3 sides and positive size");
  }
  TriangleMesh m;
  const auto n = static_cast<std::uint32_t>(sides);
  for (int level = 0; level < 2; ++level) {
    for (int i = 0; i < sides; ++i) {
      const double a = 2.0 * M_PI * i / sides;
      m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), level == 0 ? 0.0 : height});
    }
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.triangles.push_back({i, j, n + j});
    m.triangles.push_back({i, n + j, n + i});
  }
  for (std::uint32_t i = 1; i + 1 < n; ++i) {
    m.triangles.push_back({0, i + 1, i});
    m.triangles.push_back({n, n + i, n + i + 1});
  }
  return m;
}

TriangleMesh make_icosphere(int subdivisions, double radius, Rng* rng, double jitter) {
  if (subdivisions < 0 || subdivisions > 7 || !(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "icosphere needs 0..7 subdivisions and positive radius");
  }
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (Vec3& v : m.vertices) v = (1.0 / norm(v)) * v;
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto [it, fresh] = midpoint.try_emplace({key.first, key.second}, 0);
      if (fresh) {
        const Vec3 p = 0.5 * (m.vertices[a] + m.vertices[b]);
        it->second = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.push_back((1.0 / norm(p)) * p);
      }
      return it->second;
    };
    std::vector<Triangle> next;
    for (const Triangle& tri : m.triangles) {
      const std::uint32_t ab = mid(tri[0], tri[1]);
      const std::uint32_t bc = mid(tri[1], tri[2]);
      const std::uint32_t ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (Vec3& v : m.vertices) {
    double r = radius;
    if (rng != nullptr && jitter > 0.0) r *= 1.0 + jitter * (2.0 * rng->uniform() - 1.0);
    v = r * v;
  }
  return m;
}

TriangleMesh convex_hull(std::span<const Vec3> points) {
  if (points.size() < 4) throw Error(ErrorCode::kInvalidArgument, "hull needs at least 4 points");
  Bounds box;
  for (const Vec3& p : points) box.extend(p);
  const double scale = std::max(box.diagonal(), 1e-300);
  const double eps = 1e-12 * scale;

  // Initial tetrahedron from extreme points.
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (norm2(points[i] - points[i0]) > norm2(points[i1] - points[i0])) i1 = i;
  }
  std::size_t i2 = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = norm2(cross(points[i1] - points[i0], points[i] - points[i0]));
    if (d > best) best = d, i2 = i;
  }
  std::size_t i3 = 0;
  best = -1.0;
  const Vec3 base = cross(points[i1] - points[i0], points[i2] - points[i0]);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = std::fabs(dot(base, points[i] - points[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (!(best > eps * scale * scale)) throw Error(ErrorCode::kInvalidArgument, "hull points are coplanar");

  struct Face {
    std::uint32_t v[3];
    Vec3 normal;
    bool alive = true;
  };
  std::vector<Face> faces;
  faces.reserve(4 * points.size() + 4);
  std::unordered_map<std::uint64_t, std::uint32_t> edge_face;
  auto key = [](std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; };
  auto add_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    Face f;
    f.v[0] = a, f.v[1] = b, f.v[2] = c;
    f.normal = cross(points[b] - points[a], points[c] - points[a]);
    const auto id = static_cast<std::uint32_t>(faces.size());
    faces.push_back(f);
    edge_face[key(a, b)] = id;
    edge_face[key(b, c)] = id;
    edge_face[key(c, a)] = id;
  };
  auto a = static_cast<std::uint32_t>(i0);
  auto b = static_cast<std::uint32_t>(i1);
  auto c = static_cast<std::uint32_t>(i2);
  const auto d = static_cast<std::uint32_t>(i3);
  if (dot(base, points[d] - points[a]) > 0.0) std::swap(b, c);
  add_face(a, b, c);
  add_face(a, d, b);
  add_face(b, d, c);
  add_face(c, d, a);

  auto visible = [&](const Face& f, const Vec3& p) {
    return dot(f.normal, p - points[f.v[0]]) > eps * norm(f.normal);
  };
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
    const Vec3& p = points[pi];
    std::vector<std::uint32_t> seen;
    for (std::uint32_t f = 0; f < faces.size(); ++f) {
      if (faces[f].alive && visible(faces[f], p)) seen.push_back(f);
    }
    if (seen.empty()) continue;
    std::vector<std::uint8_t> is_seen(faces.size(), 0);
    for (auto f : seen) is_seen[f] = 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;
    for (auto f : seen) {
      for (int e = 0; e < 3; ++e) {
        const std::uint32_t u = faces[f].v[e];
        const std::uint32_t v = faces[f].v[(e + 1) % 3];
        auto it = edge_face.find(key(v, u));
        if (it != edge_face.end() && !is_seen[it->second]) horizon.emplace_back(u, v);
      }
    }
    for (auto f : seen) {
      faces[f].alive = false;
      for (int e = 0; e < 3; ++e) edge_face.erase(key(faces[f].v[e], faces[f].v[(e + 1) % 3]));
    }
    for (auto [u, v] : horizon) add_face(u, v, static_cast<std::uint32_t>(pi));
  }

  TriangleMesh m;
  std::vector<std::uint32_t> remap(points.size(), kBoundary);
  for (const Face& f : faces) {
    if (!f.alive) continue;
    Triangle t;
    for (int e = 0; e < 3; ++e) {
      if (remap[f.v[e]] == kBoundary) {
        remap[f.v[e]] = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.push_back(points[f.v[e]]);
      }
      t[e] = remap[f.v[e]];
    }
    m.triangles.push_back(t);
  }
  return m;
}

TriangleMesh make_random_convex(Rng& rng, int count, double radius) {
  if (count < 4) throw Error(ErrorCode::kInvalidArgument, "random convex needs at least 4 points");
  std::vector<Vec3> pts;
  for (int i = 0; i < count; ++i) {
    Vec3 dir;
    do {
      dir = {rng.normal(), rng.normal(), rng.normal()};
    } while (norm2(dir) < 1e-12);
    const double r = radius * (0.7 + 0.3 * rng.uniform());
    pts.push_back((r / norm(dir)) * dir);
  }
  return convex_hull(pts);
}

TriangleMesh make_torus(double major, double minor, int resolution, const Vec3& grid_offset) {
  const GridSpec grid = torus_grid(major, minor, resolution, grid_offset);
  return marching_cubes([&](const Vec3& p) { return torus_field(p, major, minor); }, grid);
}

TriangleMesh gen_support_lattice(const LatticeSpec& spec, std::uint64_t seed) {
  if (spec.pillars < 1) throw Error(ErrorCode::kInvalidArgument, "lattice needs at least one pillar");
  if (!(spec.footprint_x > 0 && spec.footprint_y > 0 && spec.pillar_width > 0 && spec.pillar_height > 0 &&
        spec.slab_thickness > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "lattice dimensions must be positive");
  }
  Rng rng(seed);
  TriangleMesh m = make_box(snap_dyadic(Vec3{spec.footprint_x, spec.footprint_y, spec.slab_thickness}));
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.pillars))));
  const int rows = (spec.pillars + cols - 1) / cols;
  const double pitch_x = spec.footprint_x / cols;
  const double pitch_y = spec.footprint_y / rows;
  const double half = spec.pillar_width / 2.0;
  const double z0 = snap_dyadic(spec.slab_thickness);
  const double z1 = snap_dyadic(spec.slab_thickness + spec.pillar_height);
  for (int i = 0; i < spec.pillars; ++i) {
    double cx = (i % cols + 0.5) * pitch_x;
    double cy = (i / cols + 0.5) * pitch_y;
    if (spec.jitter > 0.0) {
      cx += spec.jitter * pitch_x * (2.0 * rng.uniform() - 1.0);
      cy += spec.jitter * pitch_y * (2.0 * rng.uniform() - 1.0);
    }
    // Snap the corner and add the snapped width so every pillar is congruent.
    const double x0 = snap_dyadic(cx - half);
    const double y0 = snap_dyadic(cy - half);
    const double w = snap_dyadic(spec.pillar_width);
    m.append(make_box(Vec3{x0, y0, z0}, Vec3{x0 + w, y0 + w, z1}));
  }
  return m;
}

Vec3 RigidTransform::apply(const Vec3& p) const {
  return {sign[0] * p[axis[0]] + translation.x, sign[1] * p[axis[1]] + translation.y,
          sign[2] * p[axis[2]] + translation.z};
}

bool RigidTransform::mirrors() const {
  int inversions = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) inversions += axis[i] > axis[j] ? 1 : 0;
  }
  const int flips = (sign[0] < 0) + (sign[1] < 0) + (sign[2] < 0);
  return ((inversions + flips) & 1) != 0;
}

RigidTransform random_signed_permutation(Rng& rng) {
  RigidTransform t;
  std::array<std::array<int, 3>, 6> perms = {{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  t.axis = perms[rng.below(6)];
  for (int& s : t.sign) s = rng.below(2) == 0 ? 1 : -1;
  return t;
}

TriangleMesh transform(const TriangleMesh& mesh, const RigidTransform& t) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.apply(v);
  if (t.mirrors()) {
    for (Triangle& tri : out.triangles) std::swap(tri[1], tri[2]);
  }
  return out;
}

TriangleMesh rotate(const TriangleMesh& mesh, const Vec3& axis, double angle) {
  const double len = norm(axis);
  if (!(len > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rotation axis must be nonzero");
  const Vec3 k = (1.0 / len) * axis;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
  return out;
}

TriangleMesh translate(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = v + offset;
  return out;
}

TriangleMesh shuffle_mesh(const TriangleMesh& mesh, Rng& rng) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<std::uint32_t> perm(nv);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = nv; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  TriangleMesh out;
  out.unit_hint = mesh.unit_hint;
  out.vertices.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) out.vertices[perm[i]] = mesh.vertices[i];
  out.triangles = mesh.triangles;
  for (std::size_t i = out.triangles.size(); i > 1; --i) std::swap(out.triangles[i - 1], out.triangles[rng.below(i)]);
  for (Triangle& t : out.triangles) {
    for (auto& v : t) v = perm[v];
    std::rotate(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(rng.below(3)), t.end());
  }
  return out;
}

}  // namespace gw3d
