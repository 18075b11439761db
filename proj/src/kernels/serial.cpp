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

#include "gw3d/kernels.hpp"

namespace gw3d::kernels {

LocalFeature facet_feature(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                           std::span<const std::uint8_t> degenerate_mask, std::uint32_t facet) {
  const Triangle& t = mesh.triangles[facet];
  const TriangleShape shape =
      measure_triangle(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  LocalFeature f;
  f.facet = facet;
  f.perimeter = shape.perimeter;
  f.quality = shape.quality;
  const auto& across = adjacency.neighbors()[facet];
  for (int e = 0; e < 3; ++e) {
    const std::uint32_t other = across[e];
    if (other == kBoundary || degenerate_mask[other] != 0) {
      f.dihedral[e] = kBoundaryDihedral;
      continue;
    }
    const Triangle& u = mesh.triangles[other];
    const Vec3 n = cross(mesh.vertices[u[1]] - mesh.vertices[u[0]], mesh.vertices[u[2]] - mesh.vertices[u[0]]);
    f.dihedral[e] = angle_between(shape.normal, n);
  }
  std::sort(f.dihedral.begin(), f.dihedral.end());
  return f;
}

namespace serial {

std::vector<LocalFeature> local_features(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                                         std::span<const std::uint8_t> degenerate_mask) {
  std::vector<LocalFeature> out;
  out.reserve(mesh.triangles.size());
  for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
    if (degenerate_mask[t] == 0) out.push_back(facet_feature(mesh, adjacency, degenerate_mask, t));
  }
  return out;
}

std::vector<WordCount> quantize(std::span<const LocalFeature> features, const WordConfig& config,
                                const SplitRegistry& registry) {
  std::vector<WordId> ids;
  ids.reserve(features.size());
  for (const LocalFeature& f : features) {
    for (const GeometricWord& w : quantize_local(f, config, registry)) ids.push_back(w.id);
  }
  return count_words(std::move(ids));
}

std::vector<std::uint32_t> gather_candidates(std::span<const std::span<const Posting>> lists) {
  std::vector<std::uint32_t> out;
  for (const auto& list : lists) {
    for (const Posting& p : list) out.push_back(p.slot);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> score_all(std::span<const std::uint32_t> items, const ScoreFn& score) {
  std::vector<double> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[i] = score(items[i]);
  return out;
}

void accumulate(Histogram& histogram, std::span<const double> values) {
  for (double v : values) histogram.add(v);
}

}  // namespace serial
}  // namespace gw3d::kernels
