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

#ifndef GW3D_MARCHING_CUBES_HPP_
#define GW3D_MARCHING_CUBES_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "gw3d/geometry.hpp"
#include "gw3d/mesh.hpp"

namespace gw3d {

// Sample lattice: point (i, j, k) sits at origin + (i, j, k) * spacing.
struct GridSpec {
  Vec3 origin;
  double spacing = 1.0;
  std::array<std::uint32_t, 3> dims{2, 2, 2};  // samples per axis

  Vec3 point(std::uint32_t i, std::uint32_t j, std::uint32_t k) const;
  void validate() const;
};

using ScalarField = std::function<double(const Vec3&)>;

// Loops of cube edges (Bourke numbering) for each of the 256 inside-corner
// masks. A corner is inside when its value is below the iso level. Built by
// walking every face counter-clockwise as seen from outside the cube and
// joining each entering crossing to the next leaving one, so diagonal
// inside corners on a face are kept apart and loop order gives outward
// facing triangles.
const std::array<std::vector<std::vector<int>>, 256>& marching_cubes_table();

// Isosurface f = iso with vertices linearly interpolated along grid edges
// and shared between cubes. No cleanup: samples equal to the iso level put
// vertices on grid corners and produce the slivers that come with that.
TriangleMesh marching_cubes(const ScalarField& field, const GridSpec& grid, double iso = 0.0);
TriangleMesh marching_cubes(const std::vector<double>& samples, const GridSpec& grid, double iso = 0.0);

// (sqrt(x^2 + y^2) - R)^2 + z^2 - r^2
double torus_field(const Vec3& p, double major, double minor);
double sphere_field(const Vec3& p, const Vec3& center, double radius);

// Spacing minor / resolution with the origin on a multiple of the spacing,
// so the planes z = +-minor and the points at radius `major` on the axes lie
// on grid samples. `offset` (in units of spacing) shifts the lattice off
// that alignment.
GridSpec torus_grid(double major, double minor, int resolution, const Vec3& offset = {});

}  // namespace gw3d

#endif  // GW3D_MARCHING_CUBES_HPP_
