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

#include "gw3d/geometry.hpp"

#include <numbers>

namespace gw3d {

TriangleShape measure_triangle(Vec3 a, Vec3 b, Vec3 c) {
  TriangleShape s;
  s.normal = cross(b - a, c - a);
  s.area = 0.5 * norm(s.normal);
  s.perimeter = canonical_sum3(norm(b - a), norm(c - b), norm(a - c));
  if (s.perimeter > 0.0) {
    s.quality = 4.0 * std::numbers::sqrt3 * s.area / (s.perimeter * s.perimeter);
    s.quality = std::clamp(s.quality, 0.0, 1.0);
  }
  return s;
}

double angle_between(Vec3 n1, Vec3 n2) {
  // atan2 keeps full precision near 0 and pi where acos does not.
  return std::atan2(norm(cross(n1, n2)), dot(n1, n2));
}

}  // namespace gw3d
