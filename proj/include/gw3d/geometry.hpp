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

#ifndef GW3D_GEOMETRY_HPP_
#define GW3D_GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>

namespace gw3d {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }

  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
};

// Sum of three terms evaluated smallest-first. Every 3-term reduction in the
// feature geometry goes through here so that permuting or negating axes
// permutes the terms without changing the rounded result.
inline double canonical_sum3(double a, double b, double c) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return (a + b) + c;
}

inline double dot(Vec3 a, Vec3 b) {
  return canonical_sum3(a.x * b.x, a.y * b.y, a.z * b.z);
}

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }

inline bool is_finite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Lexicographic order on coordinate tuples.
inline bool lex_less(Vec3 a, Vec3 b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

struct Bounds {
  Vec3 min;
  Vec3 max;
  bool empty = true;

  void extend(Vec3 p) {
    if (empty) {
      min = max = p;
      empty = false;
      return;
    }
    min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
    max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
  }
  Vec3 extent() const { return empty ? Vec3{} : max - min; }
  double diagonal() const { return empty ? 0.0 : norm(extent()); }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

// Measurements of one triangle given its corners in winding order.
struct TriangleShape {
  double area = 0.0;
  double perimeter = 0.0;
  double quality = 0.0;  // 4*sqrt(3)*A/p^2, 1/3 for equilateral
  Vec3 normal;           // unnormalized (b-a)x(c-a)
};

TriangleShape measure_triangle(Vec3 a, Vec3 b, Vec3 c);

// Unsigned angle in [0, pi] between two (unnormalized) normals.
double angle_between(Vec3 n1, Vec3 n2);

}  // namespace gw3d

#endif  // GW3D_GEOMETRY_HPP_
