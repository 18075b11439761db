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

#ifndef GW3D_GENERATORS_HPP_
#define GW3D_GENERATORS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gw3d/analysis.hpp"
#include "gw3d/geometry.hpp"
#include "gw3d/mesh.hpp"

namespace gw3d {

inline constexpr int kDyadicBits = 16;

double snap_dyadic(double v, int bits = kDyadicBits);
Vec3 snap_dyadic(const Vec3& v, int bits = kDyadicBits);
// Rounds every coordinate to a multiple of 2^-bits. Sums of such values are
// exact, so translating by a snapped vector never changes edge vectors.
void snap_dyadic(TriangleMesh& mesh, int bits = kDyadicBits);

// Axis-aligned box with its min corner at the origin, outward winding.
TriangleMesh make_box(const Vec3& size);
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);

// Right prism over a regular polygon in the xy plane, caps fan-triangulated.
TriangleMesh make_prism(int sides, double radius, double height);

// Subdivided icosahedron; `jitter` > 0 moves each vertex radially by up to
// that fraction of the radius.
TriangleMesh make_icosphere(int subdivisions, double radius, Rng* rng = nullptr, double jitter = 0.0);

// Outward-wound convex hull; points strictly inside are dropped. Throws
// kInvalidArgument when the points are (nearly) coplanar.
TriangleMesh convex_hull(std::span<const Vec3> points);

// Hull of `count` random points in a sphere shell.
TriangleMesh make_random_convex(Rng& rng, int count, double radius);

// Marching-cubes torus on a grid shifted off the tangent alignment.
TriangleMesh make_torus(double major, double minor, int resolution, const Vec3& grid_offset);

struct LatticeSpec {
  double footprint_x = 8.0;
  double footprint_y = 8.0;
  int pillars = 16;
  double pillar_width = 0.25;
  double pillar_height = 3.0;
  double slab_thickness = 0.5;
  double jitter = 0.0;  // fraction of the pillar pitch
};

// Base slab plus a grid of identical pillars standing on it.
TriangleMesh gen_support_lattice(const LatticeSpec& spec, std::uint64_t seed);

// Rigid motion limited to signed axis permutations plus a translation, so
// dyadic coordinates stay exact.
struct RigidTransform {
  std::array<int, 3> axis{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};
  Vec3 translation;

  Vec3 apply(const Vec3& p) const;
  // Odd permutations and an odd count of flips mirror the mesh; winding is
  // reversed then so orientation stays outward.
  bool mirrors() const;

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

RigidTransform random_signed_permutation(Rng& rng);
TriangleMesh transform(const TriangleMesh& mesh, const RigidTransform& t);

// Rotation about an arbitrary axis (unit length not required).
TriangleMesh rotate(const TriangleMesh& mesh, const Vec3& axis, double angle);
TriangleMesh translate(const TriangleMesh& mesh, const Vec3& offset);

// Random reordering of triangles, rotation of each triangle's corners, and
// renumbering of vertices; geometry is unchanged.
TriangleMesh shuffle_mesh(const TriangleMesh& mesh, Rng& rng);

}  // namespace gw3d

#endif  // GW3D_GENERATORS_HPP_
