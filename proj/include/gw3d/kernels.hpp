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

#ifndef GW3D_KERNELS_HPP_
#define GW3D_KERNELS_HPP_

// Data-parallel inner loops. `serial` is the reference implementation and
// `parallel` the OpenMP one; both must return identical results for any
// thread count or schedule.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gw3d/histogram.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/words.hpp"

namespace gw3d::kernels {

struct Posting {
  std::uint32_t slot = 0;
  std::uint32_t count = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

using ScoreFn = std::function<double(std::uint32_t)>;

// Feature of one facet; `degenerate_mask[t] != 0` excludes facet t and makes
// it a boundary for its neighbors.
LocalFeature facet_feature(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                           std::span<const std::uint8_t> degenerate_mask, std::uint32_t facet);

namespace serial {

std::vector<LocalFeature> local_features(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                                         std::span<const std::uint8_t> degenerate_mask);
std::vector<WordCount> quantize(std::span<const LocalFeature> features, const WordConfig& config,
                                const SplitRegistry& registry);
// Sorted, de-duplicated union of the slots in the given posting lists.
std::vector<std::uint32_t> gather_candidates(std::span<const std::span<const Posting>> lists);
std::vector<double> score_all(std::span<const std::uint32_t> items, const ScoreFn& score);
void accumulate(Histogram& histogram, std::span<const double> values);

}  // namespace serial

namespace parallel {

std::vector<LocalFeature> local_features(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                                         std::span<const std::uint8_t> degenerate_mask);
std::vector<WordCount> quantize(std::span<const LocalFeature> features, const WordConfig& config,
                                const SplitRegistry& registry);
std::vector<std::uint32_t> gather_candidates(std::span<const std::span<const Posting>> lists);
std::vector<double> score_all(std::span<const std::uint32_t> items, const ScoreFn& score);
void accumulate(Histogram& histogram, std::span<const double> values);

}  // namespace parallel

}  // namespace gw3d::kernels

#endif  // GW3D_KERNELS_HPP_
