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

#ifndef GW3D_WORDS_HPP_
#define GW3D_WORDS_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gw3d/mesh.hpp"

namespace gw3d {

// A word id packs its kind into bit 63 and its refinement level into bits
// 56..62; the low 56 bits hash the bin tuple.
using WordId = std::uint64_t;

enum class WordKind : std::uint8_t { kLocal = 0, kGlobal = 1 };

inline constexpr WordId kGlobalWordBit = WordId{1} << 63;
inline constexpr int kMaxRefinementLevel = 32;

inline bool is_global(WordId id) { return (id & kGlobalWordBit) != 0; }
inline WordKind word_kind(WordId id) { return is_global(id) ? WordKind::kGlobal : WordKind::kLocal; }
inline int word_level(WordId id) { return static_cast<int>((id >> 56) & 0x7f); }

WordId make_word_id(WordKind kind, int level, std::span<const std::int64_t> tuple);

std::string_view to_string(WordKind kind);

// Per-facet measurements; dihedral angles are unsigned, ascending, with -1
// marking an edge whose neighbor is missing or degenerate.
struct LocalFeature {
  std::uint32_t facet = 0;
  double perimeter = 0.0;
  double quality = 0.0;
  std::array<double, 3> dihedral{-1.0, -1.0, -1.0};

  friend bool operator==(const LocalFeature&, const LocalFeature&) = default;
};

inline constexpr double kBoundaryDihedral = -1.0;

struct GeometricWord {
  WordId id = 0;
  WordKind kind = WordKind::kLocal;
  int level = 0;

  friend bool operator==(const GeometricWord&, const GeometricWord&) = default;
};

struct WordConfig {
  double log_perimeter_width = 0.25;
  int quality_bins = 8;
  int dihedral_bins = 16;   // bins centred on k*pi/dihedral_bins, k = 0..dihedral_bins
  double soft_margin = 0.0; // fraction of a bin width; 0 disables soft binning
  double log_area_width = 0.5;
  int aspect_bins = 16;
  int sphericity_bins = 16;
  double log_count_width = 0.5;
  double weld_epsilon = 1e-9;
  DegenerateTolerances degenerate;

  void validate() const;

  // "key = value" lines; unknown keys are rejected on read.
  std::string to_text() const;
  static WordConfig from_text(std::string_view text);

  friend bool operator==(const WordConfig&, const WordConfig&) = default;
};

// Words whose bins have been subdivided, mapped to the refinement level of
// their synonyms.
using SplitRegistry = std::map<WordId, std::uint8_t>;

struct LocalBins {
  std::int64_t perimeter = 0;
  std::int64_t quality = 0;
  std::array<std::int64_t, 3> dihedral{};

  friend bool operator==(const LocalBins&, const LocalBins&) = default;
};

// Bin indices at a refinement level. Quality and dihedral bins double per
// level and nest inside their parent bins; the perimeter bin is fixed.
LocalBins local_bins(const LocalFeature& feature, const WordConfig& config, int level = 0);
WordId local_word_id(const LocalBins& bins, int level);

// The feature itself plus, when soft binning is on and a component lies
// within the margin of an interior bin edge, a copy nudged across that edge.
std::vector<LocalFeature> soft_bin_features(const LocalFeature& feature, const WordConfig& config);

// Word of a feature after following the split registry down to its finest
// refinement level.
WordId refine_word(const LocalFeature& feature, const WordConfig& config, const SplitRegistry& registry);

// One or two words (two only when soft binning places the feature within the
// margin of a bin edge). Throws on non-finite input or p <= 0.
std::vector<GeometricWord> quantize_local(const LocalFeature& feature, const WordConfig& config,
                                          const SplitRegistry& registry = {});

std::vector<LocalFeature> extract_local_features(const TriangleMesh& mesh,
                                                 const MeshAdjacency& adjacency,
                                                 std::span<const std::uint32_t> degenerate);

// Eigenvalues, descending, of the area-weighted second-moment matrix of the
// surface about its centroid. Invariant under rigid motion.
std::array<double, 3> surface_principal_moments(const TriangleMesh& mesh);

// g2 uses the principal-axis extents (square roots of the moments) so that it
// is rigid-motion invariant like the rest of the bag.
std::vector<GeometricWord> extract_global_words(const TriangleMesh& mesh, const MeshStats& stats,
                                                const WordConfig& config);

struct WordCount {
  WordId word = 0;
  std::uint32_t count = 0;

  friend auto operator<=>(const WordCount&, const WordCount&) = default;
};

struct WordBag {
  std::string model_id;
  std::vector<WordCount> words;  // ascending by id, counts > 0
  std::uint32_t local_total = 0;
  bool had_degenerates = false;
  bool had_boundary = false;

  std::uint32_t count(WordId word) const;
  void add(WordId word, std::uint32_t n);
  std::uint64_t total_count() const;
  bool empty() const { return words.empty(); }

  friend bool operator==(const WordBag&, const WordBag&) = default;
};

// Sorts and merges duplicate ids.
std::vector<WordCount> count_words(std::vector<WordId> ids);

// "word_hex kind level count" per line, ascending by id.
std::string dump_bag(const WordBag& bag);

struct BagBuild {
  WeldResult weld;
  MeshStats stats;
  std::vector<DegenerateFacet> degenerate;
  std::vector<LocalFeature> features;
  WordBag bag;
};

enum class Exec { kSerial, kParallel };

// weld -> stats -> degenerate scan -> local features -> quantize, plus
// global words. Throws Error(kEmptyBag) when no facet survives.
BagBuild build_bag_detailed(const TriangleMesh& mesh, const WordConfig& config,
                            const SplitRegistry& registry = {}, Exec exec = Exec::kParallel);
WordBag build_bag(const TriangleMesh& mesh, const WordConfig& config,
                  const SplitRegistry& registry = {}, Exec exec = Exec::kParallel);

// Local features only (possibly none); what the index needs to re-derive
// split words.
std::vector<LocalFeature> derive_local_features(const TriangleMesh& mesh, const WordConfig& config);

}  // namespace gw3d

#endif  // GW3D_WORDS_HPP_
