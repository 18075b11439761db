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

#ifndef GW3D_TTD_HPP_
#define GW3D_TTD_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gw3d/generators.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/words.hpp"

namespace gw3d {

enum class PartFamily { kBox, kPrism, kIcosphere, kTorus, kConvex };

std::string_view to_string(PartFamily family);
PartFamily part_family_from_string(std::string_view text);

struct TTDSpec {
  std::uint64_t seed = 42;
  int composites = 100;
  int distractors = 400;
  std::vector<PartFamily> families{PartFamily::kBox, PartFamily::kPrism, PartFamily::kIcosphere,
                                   PartFamily::kTorus, PartFamily::kConvex};
  double part_scale_min = 0.25;
  double part_scale_max = 4.0;
  double host_radius_min = 2.0;
  double host_radius_max = 6.0;
  int host_points_min = 24;
  int host_points_max = 64;
  double min_gap_fraction = 0.01;  // of the composite's bbox diagonal
  double offset_jitter = 0.25;     // lateral part offset, fraction of host diagonal
  int max_retries = 8;

  void validate() const;
  std::string to_json() const;
  static TTDSpec from_json(std::string_view text);
};

struct TTDItem {
  std::string id;
  TriangleMesh mesh;
  std::string family;
};

struct TTDLabel {
  std::string composite_id;
  std::vector<std::string> part_ids;
  std::vector<RigidTransform> transforms;
};

struct TTDCorpus {
  std::vector<TTDItem> parts;
  std::vector<TTDItem> composites;
  std::vector<TTDItem> distractors;
  std::vector<TTDLabel> labels;
};

// Deterministic in the spec. Each composite is a host plus one rigidly moved
// part placed past the host in +x; distractors are hosts alone. Throws
// kOverlap if a placement keeps failing the separation check.
TTDCorpus gen_ttd(const TTDSpec& spec);

TriangleMesh make_part(PartFamily family, Rng& rng, double scale_min, double scale_max);
TriangleMesh make_host(Rng& rng, const TTDSpec& spec);

// True when welding and degenerate detection treat every facet of `part`
// the same inside a mesh whose bounding box has the given diagonal.
bool classified_alike(const TriangleMesh& part, double composite_diagonal, const WordConfig& config);

std::string labels_json(const TTDCorpus& corpus);

// parts/, composites/, distractors/ as binary STL plus labels.json.
void write_ttd(const TTDCorpus& corpus, const std::string& dir);

}  // namespace gw3d

#endif  // GW3D_TTD_HPP_
