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

#include "gw3d/ttd.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "json.hpp"

#include "gw3d/error.hpp"
#include "gw3d/mesh_io.hpp"

namespace gw3d {

namespace {

using nlohmann::json;

std::string numbered(std::string_view prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d", i);
  return std::string(prefix) + "_" + buf;
}

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

json transform_json(const RigidTransform& t) {
  return {{"axis", t.axis}, {"sign", t.sign}, {"translation", {t.translation.x, t.translation.y, t.translation.z}}};
}

}  // namespace

std::string_view to_string(PartFamily family) {
  switch (family) {
    case PartFamily::kBox: return "box";
    case PartFamily::kPrism: return "prism";
    case PartFamily::kIcosphere: return "icosphere";
    case PartFamily::kTorus: return "torus";
    case PartFamily::kConvex: return "convex";
  }
  return "?";
}

PartFamily part_family_from_string(std::string_view text) {
  for (auto f : {PartFamily::kBox, PartFamily::kPrism, PartFamily::kIcosphere, PartFamily::kTorus, PartFamily::kConvex}) {
    if (to_string(f) == text) return f;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown part family '" + std::string(text) + "'");
}

void TTDSpec::validate() const {
  if (composites < 0 || distractors < 0) throw Error(ErrorCode::kInvalidArgument, "counts must be non-negative");
  if (families.empty()) throw Error(ErrorCode::kInvalidArgument, "no part families selected");
  if (!(part_scale_min > 0 && part_scale_max >= part_scale_min && host_radius_min > 0 &&
        host_radius_max >= host_radius_min)) {
    throw Error(ErrorCode::kInvalidArgument, "scale ranges must be positive and ordered");
  }
  if (host_points_min < 4 || host_points_max < host_points_min) {
    throw Error(ErrorCode::kInvalidArgument, "host point range must start at 4 or more");
  }
  if (!(min_gap_fraction > 0.0) || offset_jitter < 0.0 || max_retries < 1) {
    throw Error(ErrorCode::kInvalidArgument, "placement parameters out of range");
  }
}

std::string TTDSpec::to_json() const {
  json families_json = json::array();
  for (auto f : families) families_json.push_back(std::string(to_string(f)));
  json j = {{"seed", seed},
            {"composites", composites},
            {"distractors", distractors},
            {"families", families_json},
            {"part_scale", {part_scale_min, part_scale_max}},
            {"host_radius", {host_radius_min, host_radius_max}},
            {"host_points", {host_points_min, host_points_max}},
            {"min_gap_fraction", min_gap_fraction},
            {"offset_jitter", offset_jitter},
            {"max_retries", max_retries}};
  return j.dump(2) + "\n";
}

TTDSpec TTDSpec::from_json(std::string_view text) {
  TTDSpec s;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("TTD spec: ") + e.what());
  }
  try {
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("composites")) s.composites = j.at("composites").get<int>();
    if (j.contains("distractors")) s.distractors = j.at("distractors").get<int>();
    if (j.contains("families")) {
      s.families.clear();
      for (const auto& f : j.at("families")) s.families.push_back(part_family_from_string(f.get<std::string>()));
    }
    if (j.contains("part_scale")) {
      s.part_scale_min = j.at("part_scale").at(0).get<double>();
      s.part_scale_max = j.at("part_scale").at(1).get<double>();
    }
    if (j.contains("host_radius")) {
      s.host_radius_min = j.at("host_radius").at(0).get<double>();
      s.host_radius_max = j.at("host_radius").at(1).get<double>();
    }
    if (j.contains("host_points")) {
      s.host_points_min = j.at("host_points").at(0).get<int>();
      s.host_points_max = j.at("host_points").at(1).get<int>();
    }
    if (j.contains("min_gap_fraction")) s.min_gap_fraction = j.at("min_gap_fraction").get<double>();
    if (j.contains("offset_jitter")) s.offset_jitter = j.at("offset_jitter").get<double>();
    if (j.contains("max_retries")) s.max_retries = j.at("max_retries").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("TTD spec: ") + e.what());
  }
  s.validate();
  return s;
}

namespace {

TriangleMesh draw_part(PartFamily family, Rng& rng, double scale_min, double scale_max) {
  const double s = log_uniform(rng, scale_min, scale_max);
  TriangleMesh m;
  switch (family) {
    case PartFamily::kBox:
      m = make_box(Vec3{s * rng.uniform(1.0, 3.0), s * rng.uniform(1.0, 3.0), s * rng.uniform(1.0, 3.0)});
      break;
    case PartFamily::kPrism: {
      const int sides = 5 + static_cast<int>(rng.below(8));
      m = make_prism(sides, s, s * rng.uniform(0.5, 2.5));
      break;
    }
    case PartFamily::kIcosphere:
      m = make_icosphere(1 + static_cast<int>(rng.below(2)), s, &rng, 0.15);
      break;
    case PartFamily::kTorus: {
      const double minor = s * rng.uniform(0.2, 0.4);
      const Vec3 offset{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
      m = make_torus(s, minor, 3, offset);
      break;
    }
    case PartFamily::kConvex:
      m = make_random_convex(rng, 16 + static_cast<int>(rng.below(33)), s);
      break;
  }
  snap_dyadic(m);
  return m;
}

}  // namespace

TriangleMesh make_part(PartFamily family, Rng& rng, double scale_min, double scale_max) {
  return draw_part(family, rng, scale_min, scale_max);
}

bool classified_alike(const TriangleMesh& part, double composite_diagonal, const WordConfig& config) {
  const double diag = part.bounds().diagonal();
  const WeldResult weld = weld_vertices(part, config.weld_epsilon);
  const double min_edge = 2.0 * std::sqrt(3.0) * config.weld_epsilon * composite_diagonal;
  const double tol = config.degenerate.area_tol;
  for (const Triangle& t : weld.mesh.triangles) {
    const Vec3& a = weld.mesh.vertices[t[0]];
    const Vec3& b = weld.mesh.vertices[t[1]];
    const Vec3& c = weld.mesh.vertices[t[2]];
    if (norm(b - a) < min_edge || norm(c - b) < min_edge || norm(a - c) < min_edge) return false;
    const double area = measure_triangle(a, b, c).area;
    if (area >= tol * diag * diag && area < tol * composite_diagonal * composite_diagonal) return false;
  }
  return true;
}

TriangleMesh make_host(Rng& rng, const TTDSpec& spec) {
  const int count = spec.host_points_min + static_cast<int>(rng.below(
                                               static_cast<std::uint64_t>(spec.host_points_max - spec.host_points_min + 1)));
  TriangleMesh m = make_random_convex(rng, count, rng.uniform(spec.host_radius_min, spec.host_radius_max));
  snap_dyadic(m);
  return m;
}

TTDCorpus gen_ttd(const TTDSpec& spec) {
  constexpr int kMaxDraws = 64;
  spec.validate();
  Rng master(spec.seed);
  TTDCorpus corpus;
  for (int c = 0; c < spec.composites; ++c) {
    Rng rng(master.next());
    const PartFamily family = spec.families[static_cast<std::size_t>(c) % spec.families.size()];
    bool placed = false;
    for (int draw = 0; draw < kMaxDraws && !placed; ++draw) {
      TTDItem part{numbered("part", c), make_part(family, rng, spec.part_scale_min, spec.part_scale_max),
                   std::string(to_string(family))};
      TriangleMesh host = make_host(rng, spec);
      const Bounds hb = host.bounds();
      RigidTransform t = random_signed_permutation(rng);
      const Bounds pb = transform(part.mesh, t).bounds();
      const double lateral = spec.offset_jitter * hb.diagonal();
      const double dy = lateral * (2.0 * rng.uniform() - 1.0);
      const double dz = lateral * (2.0 * rng.uniform() - 1.0);
      TriangleMesh composite;
      bool separated = false;
      for (int attempt = 0; attempt < spec.max_retries && !separated; ++attempt) {
        const double gap = spec.min_gap_fraction * (2.0 + attempt) * (hb.diagonal() + pb.diagonal());
        t.translation = {snap_dyadic(hb.max.x - pb.min.x + gap) + std::ldexp(1.0, -kDyadicBits),
                         snap_dyadic(0.5 * (hb.min.y + hb.max.y - pb.min.y - pb.max.y) + dy),
                         snap_dyadic(0.5 * (hb.min.z + hb.max.z - pb.min.z - pb.max.z) + dz)};
        TriangleMesh moved = transform(part.mesh, t);
        const Bounds mb = moved.bounds();
        composite = host;
        composite.append(moved);
        separated = mb.min.x - hb.max.x >= spec.min_gap_fraction * composite.bounds().diagonal();
      }
      if (!separated) {
        throw Error(ErrorCode::kOverlap, "could not separate part from host for composite " + std::to_string(c));
      }
      // Redraw when the larger bounding box would classify a part facet
      // differently from the part alone.
      if (!classified_alike(part.mesh, composite.bounds().diagonal(), WordConfig{})) continue;

      TTDItem item{numbered("composite", c), std::move(composite), part.family};
      corpus.labels.push_back({item.id, {part.id}, {t}});
      corpus.parts.push_back(std::move(part));
      corpus.composites.push_back(std::move(item));
      placed = true;
    }
    if (!placed) throw Error(ErrorCode::kInternal, "no usable part drawn for composite " + std::to_string(c));
  }
  for (int d = 0; d < spec.distractors; ++d) {
    Rng rng(master.next());
    corpus.distractors.push_back({numbered("distractor", d), make_host(rng, spec), "host"});
  }
  return corpus;
}

std::string labels_json(const TTDCorpus& corpus) {
  json labels = json::array();
  for (const TTDLabel& l : corpus.labels) {
    json transforms = json::array();
    for (const RigidTransform& t : l.transforms) transforms.push_back(transform_json(t));
    labels.push_back({{"composite", l.composite_id}, {"parts", l.part_ids}, {"transforms", transforms}});
  }
  json families = json::object();
  for (const TTDItem& p : corpus.parts) families[p.id] = p.family;
  json j = {{"labels", labels}, {"part_families", families}};
  return j.dump(2) + "\n";
}

void write_ttd(const TTDCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"parts", "composites", "distractors"}) {
    fs::create_directories(fs::path(dir) / sub, ec);
    if (ec) throw Error(ErrorCode::kStorage, "cannot create '" + (fs::path(dir) / sub).string() + "'");
  }
  auto dump = [&](const std::vector<TTDItem>& items, const char* sub) {
    for (const TTDItem& item : items) {
      write_file((fs::path(dir) / sub / (item.id + ".stl")).string(), write_stl_binary(item.mesh, item.id));
    }
  };
  dump(corpus.parts, "parts");
  dump(corpus.composites, "composites");
  dump(corpus.distractors, "distractors");
  write_file((fs::path(dir) / "labels.json").string(), labels_json(corpus));
}

}  // namespace gw3d
