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

#include "gw3d/words.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "gw3d/error.hpp"
#include "gw3d/kernels.hpp"

namespace gw3d {

namespace {

constexpr WordId kHashMask = (WordId{1} << 56) - 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t floor_bin(double u) { return static_cast<std::int64_t>(std::floor(u)); }

std::int64_t clamp_bin(std::int64_t b, std::int64_t lo, std::int64_t hi) {
  return std::clamp(b, lo, hi);
}

}  // namespace

WordId make_word_id(WordKind kind, int level, std::span<const std::int64_t> tuple) {
  // FNV-1a over (kind, level, tuple) little-endian bytes, then a splitmix
  // finalizer to spread the low bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  mix_byte(static_cast<std::uint8_t>(kind));
  mix_byte(static_cast<std::uint8_t>(level));
  for (std::int64_t v : tuple) {
    const auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  WordId id = splitmix64(h) & kHashMask;
  id |= static_cast<WordId>(level & 0x7f) << 56;
  if (kind == WordKind::kGlobal) id |= kGlobalWordBit;
  return id;
}

std::string_view to_string(WordKind kind) {
  return kind == WordKind::kGlobal ? "global" : "local";
}

void WordConfig::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(log_perimeter_width > 0.0)) bad("log_perimeter_width must be > 0");
  if (quality_bins < 1) bad("quality_bins must be >= 1");
  if (dihedral_bins < 1) bad("dihedral_bins must be >= 1");
  if (!(soft_margin >= 0.0 && soft_margin < 0.5)) bad("soft_margin must be in [0, 0.5)");
  if (!(log_area_width > 0.0)) bad("log_area_width must be > 0");
  if (aspect_bins < 1) bad("aspect_bins must be >= 1");
  if (sphericity_bins < 1) bad("sphericity_bins must be >= 1");
  if (!(log_count_width > 0.0)) bad("log_count_width must be > 0");
  if (!(weld_epsilon >= 0.0)) bad("weld_epsilon must be >= 0");
  if (!(degenerate.area_tol >= 0.0) || !(degenerate.quality_tol >= 0.0)) bad("degenerate tolerances must be >= 0");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string WordConfig::to_text() const {
  std::ostringstream out;
  out << "log_perimeter_width = " << format_double(log_perimeter_width) << '\n'
      << "quality_bins = " << quality_bins << '\n'
      << "dihedral_bins = " << dihedral_bins << '\n'
      << "soft_margin = " << format_double(soft_margin) << '\n'
      << "log_area_width = " << format_double(log_area_width) << '\n'
      << "aspect_bins = " << aspect_bins << '\n'
      << "sphericity_bins = " << sphericity_bins << '\n'
      << "log_count_width = " << format_double(log_count_width) << '\n'
      << "weld_epsilon = " << format_double(weld_epsilon) << '\n'
      << "degenerate_area_tol = " << format_double(degenerate.area_tol) << '\n'
      << "degenerate_quality_tol = " << format_double(degenerate.quality_tol) << '\n';
  return out.str();
}

WordConfig WordConfig::from_text(std::string_view text) {
  WordConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, ParseError::Unit::kLine);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ParseError("malformed value for '" + key + "'", line_no, ParseError::Unit::kLine);
    }
    auto as_int = [&] {
      if (d != std::floor(d)) throw ParseError("'" + key + "' must be an integer", line_no, ParseError::Unit::kLine);
      return static_cast<int>(d);
    };
    if (key == "log_perimeter_width") cfg.log_perimeter_width = d;
    else if (key == "quality_bins") cfg.quality_bins = as_int();
    else if (key == "dihedral_bins") cfg.dihedral_bins = as_int();
    else if (key == "soft_margin") cfg.soft_margin = d;
    else if (key == "log_area_width") cfg.log_area_width = d;
    else if (key == "aspect_bins") cfg.aspect_bins = as_int();
    else if (key == "sphericity_bins") cfg.sphericity_bins = as_int();
    else if (key == "log_count_width") cfg.log_count_width = d;
    else if (key == "weld_epsilon") cfg.weld_epsilon = d;
    else if (key == "degenerate_area_tol") cfg.degenerate.area_tol = d;
    else if (key == "degenerate_quality_tol") cfg.degenerate.quality_tol = d;
    else throw ParseError("unknown key '" + key + "'", line_no, ParseError::Unit::kLine);
  }
  cfg.validate();
  return cfg;
}

namespace {

// Continuous bin coordinates at level 0; floor() of each gives the bin.
struct BinCoords {
  double perimeter;
  double quality;
  std::array<double, 3> dihedral;  // unused for sentinel edges
};

BinCoords bin_coords(const LocalFeature& f, const WordConfig& cfg) {
  BinCoords c{};
  // Values a few ulps under a perimeter edge (where exp/log round trips of
  // exact edges land) count as on it.
  constexpr double kPerimeterEdgeSnap = 1e-12;
  c.perimeter = std::log(f.perimeter) / cfg.log_perimeter_width + kPerimeterEdgeSnap;
  c.quality = f.quality * cfg.quality_bins;
  for (int i = 0; i < 3; ++i) {
    c.dihedral[i] = f.dihedral[i] * cfg.dihedral_bins / std::numbers::pi + 0.5;
  }
  return c;
}

void check_feature(const LocalFeature& f) {
  bool ok = std::isfinite(f.perimeter) && f.perimeter > 0.0 && std::isfinite(f.quality);
  for (double d : f.dihedral) ok = ok && std::isfinite(d);
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "non-finite or non-positive feature on facet " + std::to_string(f.facet));
  }
}

}  // namespace

WordId refine_word(const LocalFeature& f, const WordConfig& cfg, const SplitRegistry& registry) {
  int level = 0;
  WordId id = local_word_id(local_bins(f, cfg, 0), 0);
  while (!registry.empty()) {
    auto it = registry.find(id);
    if (it == registry.end() || level >= kMaxRefinementLevel) break;
    level = it->second;
    id = local_word_id(local_bins(f, cfg, level), level);
  }
  return id;
}

LocalBins local_bins(const LocalFeature& f, const WordConfig& cfg, int level) {
  const BinCoords c = bin_coords(f, cfg);
  const double scale = std::ldexp(1.0, level);
  LocalBins b;
  b.perimeter = floor_bin(c.perimeter);
  const std::int64_t qbins = std::int64_t{cfg.quality_bins} << level;
  b.quality = clamp_bin(floor_bin(c.quality * scale), 0, qbins - 1);
  const auto dtop = floor_bin((cfg.dihedral_bins + 0.5) * scale);
  for (int i = 0; i < 3; ++i) {
    b.dihedral[i] = f.dihedral[i] < 0.0 ? -1 : clamp_bin(floor_bin(c.dihedral[i] * scale), 0, dtop);
  }
  std::sort(b.dihedral.begin(), b.dihedral.end());
  return b;
}

WordId local_word_id(const LocalBins& b, int level) {
  const std::int64_t tuple[5] = {b.perimeter, b.quality, b.dihedral[0], b.dihedral[1], b.dihedral[2]};
  return make_word_id(WordKind::kLocal, level, tuple);
}

std::vector<LocalFeature> soft_bin_features(const LocalFeature& f, const WordConfig& cfg) {
  check_feature(f);
  std::vector<LocalFeature> out{f};
  if (cfg.soft_margin <= 0.0) return out;

  // Find the component closest to an interior bin edge.
  enum class Component { kNone, kPerimeter, kQuality, kDihedral };
  const BinCoords c = bin_coords(f, cfg);
  Component which = Component::kNone;
  int which_dihedral = 0;
  double best = cfg.soft_margin;
  double target_edge = 0.0;
  double direction = 0.0;
  auto consider = [&](double u, double lo_edge, double hi_edge, Component tag, int idx) {
    const double below = std::floor(u);
    const double frac = u - below;
    if (below > lo_edge && frac < best) {
      best = frac; which = tag; which_dihedral = idx; target_edge = below; direction = -1.0;
    }
    if (below + 1.0 < hi_edge && 1.0 - frac < best) {
      best = 1.0 - frac; which = tag; which_dihedral = idx; target_edge = below + 1.0; direction = 1.0;
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  consider(c.perimeter, -inf, inf, Component::kPerimeter, 0);
  consider(c.quality, 0.0, static_cast<double>(cfg.quality_bins), Component::kQuality, 0);
  for (int i = 0; i < 3; ++i) {
    if (f.dihedral[i] >= 0.0) consider(c.dihedral[i], 0.5, cfg.dihedral_bins + 0.5, Component::kDihedral, i);
  }
  if (which == Component::kNone) return out;

  constexpr double kNudge = 1e-9;
  const double u = target_edge + direction * kNudge;
  LocalFeature g = f;
  switch (which) {
    case Component::kPerimeter: g.perimeter = std::exp(u * cfg.log_perimeter_width); break;
    case Component::kQuality: g.quality = u / cfg.quality_bins; break;
    case Component::kDihedral:
      g.dihedral[which_dihedral] = (u - 0.5) * std::numbers::pi / cfg.dihedral_bins;
      std::sort(g.dihedral.begin(), g.dihedral.end());
      break;
    case Component::kNone: break;
  }
  out.push_back(g);
  return out;
}

std::vector<GeometricWord> quantize_local(const LocalFeature& f, const WordConfig& cfg,
                                          const SplitRegistry& registry) {
  std::vector<GeometricWord> out;
  for (const LocalFeature& g : soft_bin_features(f, cfg)) {
    const WordId id = refine_word(g, cfg, registry);
    if (out.empty() || out.front().id != id) out.push_back({id, WordKind::kLocal, word_level(id)});
  }
  return out;
}

std::vector<LocalFeature> extract_local_features(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                                                 std::span<const std::uint32_t> degenerate) {
  std::vector<std::uint8_t> mask(mesh.triangles.size(), 0);
  for (std::uint32_t t : degenerate) mask.at(t) = 1;
  return kernels::parallel::local_features(mesh, adjacency, mask);
}

std::array<double, 3> surface_principal_moments(const TriangleMesh& mesh) {
  const Bounds box = mesh.bounds();
  const Vec3 ref = box.empty ? Vec3{} : 0.5 * (box.min + box.max);
  // Integral of x x^T over a triangle is A/12 (sum v v^T + s s^T), s = a+b+c.
  double area = 0.0;
  Vec3 first;
  std::array<double, 6> second{};  // xx yy zz xy xz yz
  for (const Triangle& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - ref, b = mesh.vertices[t[1]] - ref, c = mesh.vertices[t[2]] - ref;
    const double A = 0.5 * norm(cross(b - a, c - a));
    if (!(A > 0.0)) continue;
    const Vec3 s = a + b + c;
    area += A;
    first = first + (A / 3.0) * s;
    auto acc = [&](int i, int j) {
      return a[i] * a[j] + b[i] * b[j] + c[i] * c[j] + s[i] * s[j];
    };
    const double w = A / 12.0;
    second[0] += w * acc(0, 0);
    second[1] += w * acc(1, 1);
    second[2] += w * acc(2, 2);
    second[3] += w * acc(0, 1);
    second[4] += w * acc(0, 2);
    second[5] += w * acc(1, 2);
  }
  if (!(area > 0.0)) return {0.0, 0.0, 0.0};
  const Vec3 m = (1.0 / area) * first;
  const double a11 = second[0] / area - m.x * m.x, a22 = second[1] / area - m.y * m.y, a33 = second[2] / area - m.z * m.z;
  const double a12 = second[3] / area - m.x * m.y, a13 = second[4] / area - m.x * m.z, a23 = second[5] / area - m.y * m.z;

  // Closed-form eigenvalues of a symmetric 3x3 matrix.
  std::array<double, 3> e;
  const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
  const double q = (a11 + a22 + a33) / 3.0;
  const double p2 = (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + (a33 - q) * (a33 - q) + 2.0 * p1;
  if (p2 <= 0.0) {
    e = {q, q, q};
  } else if (p1 == 0.0) {
    e = {a11, a22, a33};
  } else {
    const double p = std::sqrt(p2 / 6.0);
    const double b11 = (a11 - q) / p, b22 = (a22 - q) / p, b33 = (a33 - q) / p;
    const double b12 = a12 / p, b13 = a13 / p, b23 = a23 / p;
    const double det = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13) + b13 * (b12 * b23 - b22 * b13);
    const double phi = std::acos(std::clamp(det / 2.0, -1.0, 1.0)) / 3.0;
    e[0] = q + 2.0 * p * std::cos(phi);
    e[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    e[1] = 3.0 * q - e[0] - e[2];
  }
  for (double& v : e) v = std::max(v, 0.0);
  std::sort(e.begin(), e.end(), std::greater<>());
  return e;
}

std::vector<GeometricWord> extract_global_words(const TriangleMesh& mesh, const MeshStats& stats,
                                                const WordConfig& cfg) {
  std::vector<GeometricWord> out;
  auto emit = [&](std::initializer_list<std::int64_t> tuple) {
    const WordId id = make_word_id(WordKind::kGlobal, 0, std::span(tuple.begin(), tuple.size()));
    out.push_back({id, WordKind::kGlobal, 0});
  };
  auto unit_bin = [](double r, int bins) {
    return std::clamp<std::int64_t>(floor_bin(r * bins), 0, bins - 1);
  };

  if (stats.surface_area > 0.0) emit({1, floor_bin(std::log(stats.surface_area) / cfg.log_area_width)});

  const std::array<double, 3> moments = surface_principal_moments(mesh);
  if (moments[0] > 0.0) {
    const double r1 = std::sqrt(moments[1] / moments[0]);
    const double r2 = std::sqrt(moments[2] / moments[0]);
    emit({2, unit_bin(r1, cfg.aspect_bins), unit_bin(r2, cfg.aspect_bins)});
  }

  if (stats.volume && stats.surface_area > 0.0) {
    const double v = *stats.volume;
    const double s = 36.0 * std::numbers::pi * v * v / std::pow(stats.surface_area, 3);
    emit({3, unit_bin(std::clamp(s, 0.0, 1.0), cfg.sphericity_bins)});
  }

  if (stats.triangle_count > 0) {
    emit({4, floor_bin(std::log(static_cast<double>(stats.triangle_count)) / cfg.log_count_width)});
  }
  return out;
}

std::uint32_t WordBag::count(WordId word) const {
  auto it = std::lower_bound(words.begin(), words.end(), word,
                             [](const WordCount& wc, WordId w) { return wc.word < w; });
  return it != words.end() && it->word == word ? it->count : 0;
}

void WordBag::add(WordId word, std::uint32_t n) {
  if (n == 0) return;
  if (!is_global(word)) local_total += n;
  auto it = std::lower_bound(words.begin(), words.end(), word,
                             [](const WordCount& wc, WordId w) { return wc.word < w; });
  if (it != words.end() && it->word == word) {
    it->count += n;
  } else {
    words.insert(it, WordCount{word, n});
  }
}

std::uint64_t WordBag::total_count() const {
  std::uint64_t total = 0;
  for (const WordCount& wc : words) total += wc.count;
  return total;
}

std::vector<WordCount> count_words(std::vector<WordId> ids) {
  std::sort(ids.begin(), ids.end());
  std::vector<WordCount> out;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    out.push_back({ids[i], static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  return out;
}

std::string dump_bag(const WordBag& bag) {
  std::string out;
  char buf[96];
  for (const WordCount& wc : bag.words) {
    std::snprintf(buf, sizeof(buf), "%016llx %s %d %u\n", static_cast<unsigned long long>(wc.word),
                  std::string(to_string(word_kind(wc.word))).c_str(), word_level(wc.word), wc.count);
    out += buf;
  }
  return out;
}

namespace {

std::vector<std::uint8_t> degenerate_mask(std::size_t n, const std::vector<DegenerateFacet>& d) {
  std::vector<std::uint8_t> mask(n, 0);
  for (const DegenerateFacet& f : d) mask[f.triangle] = 1;
  return mask;
}

}  // namespace

BagBuild build_bag_detailed(const TriangleMesh& mesh, const WordConfig& cfg, const SplitRegistry& registry,
                            Exec exec) {
  cfg.validate();
  BagBuild b;
  b.weld = weld_vertices(mesh, cfg.weld_epsilon);
  b.stats = compute_stats(b.weld.mesh, b.weld.adjacency, cfg.degenerate);
  b.degenerate = detect_degenerate(b.weld.mesh, cfg.degenerate);
  const auto mask = degenerate_mask(b.weld.mesh.triangles.size(), b.degenerate);

  std::vector<WordCount> local;
  if (exec == Exec::kParallel) {
    b.features = kernels::parallel::local_features(b.weld.mesh, b.weld.adjacency, mask);
    local = kernels::parallel::quantize(b.features, cfg, registry);
  } else {
    b.features = kernels::serial::local_features(b.weld.mesh, b.weld.adjacency, mask);
    local = kernels::serial::quantize(b.features, cfg, registry);
  }
  if (b.features.empty()) throw Error(ErrorCode::kEmptyBag, "empty bag: no non-degenerate facets");

  b.bag.words = std::move(local);
  b.bag.local_total = 0;
  for (const WordCount& wc : b.bag.words) b.bag.local_total += wc.count;
  for (const GeometricWord& g : extract_global_words(b.weld.mesh, b.stats, cfg)) b.bag.add(g.id, 1);
  b.bag.had_degenerates = !b.degenerate.empty() || !b.weld.dropped.empty();
  b.bag.had_boundary = std::any_of(b.features.begin(), b.features.end(),
                                   [](const LocalFeature& f) { return f.dihedral[0] < 0.0; });
  return b;
}

WordBag build_bag(const TriangleMesh& mesh, const WordConfig& cfg, const SplitRegistry& registry, Exec exec) {
  return std::move(build_bag_detailed(mesh, cfg, registry, exec).bag);
}

std::vector<LocalFeature> derive_local_features(const TriangleMesh& mesh, const WordConfig& cfg) {
  cfg.validate();
  const WeldResult weld = weld_vertices(mesh, cfg.weld_epsilon);
  const auto mask = degenerate_mask(weld.mesh.triangles.size(), detect_degenerate(weld.mesh, cfg.degenerate));
  return kernels::parallel::local_features(weld.mesh, weld.adjacency, mask);
}

}  // namespace gw3d
