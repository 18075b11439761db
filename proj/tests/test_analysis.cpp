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

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <filesystem>

#include "gw3d/analysis.hpp"
#include "gw3d/error.hpp"
#include "gw3d/generators.hpp"
#include "gw3d/index.hpp"
#include "gw3d/json_codec.hpp"
#include "gw3d/marching_cubes.hpp"
#include "gw3d/mesh_io.hpp"
#include "gw3d/scoring.hpp"
#include "gw3d/ttd.hpp"
#include "support.hpp"

using namespace gw3d;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::optional<double> volume_of(const TriangleMesh& m) {
  const WeldResult w = weld_vertices(m, 1e-9);
  const MeshStats s = compute_stats(w.mesh, w.adjacency);
  return s.volume;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("histogram bins are half-open") {
  Histogram h = Histogram::fixed_width(0.0, 1.0, 4);
  CHECK(h.bin_of(0.0) == 0);
  CHECK(h.bin_of(0.25) == 1);
  CHECK(h.bin_of(0.9999) == 3);
  CHECK(h.bin_of(1.0) == Histogram::kOutside);
  CHECK(h.bin_of(-0.1) == Histogram::kOutside);
  CHECK(h.bin_of(std::nan("")) == Histogram::kOutside);
  h.add(-1.0);
  h.add(2.0);
  h.add(0.5);
  CHECK(h.underflow == 1);
  CHECK(h.overflow == 1);
  CHECK(h.n == 3);
  CHECK(h.counts[2] == 1);
  CHECK_THROWS_AS(Histogram::fixed_width(1.0, 1.0, 3), Error);
  CHECK_THROWS_AS(Histogram::log_width(0.0, 1.0, 3), Error);
  CHECK_THROWS_AS(Histogram::fixed_width(0.0, 1.0, 0), Error);
}

TEST_CASE("histogram merge is a commutative monoid") {
  Rng rng(1);
  const Histogram empty = Histogram::log_width(1e-2, 1e2, 30);
  auto random_hist = [&] {
    Histogram h = empty;
    const auto n = rng.below(500);
    for (std::uint64_t i = 0; i < n; ++i) h.add(std::exp(rng.uniform(-6, 6)));
    return h;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Histogram a = random_hist(), b = random_hist(), c = random_hist();
    Histogram ab_c = a;
    ab_c.merge(b).merge(c);
    Histogram bc = b;
    bc.merge(c);
    Histogram a_bc = a;
    a_bc.merge(bc);
    CHECK(ab_c == a_bc);
    Histogram ba = b;
    ba.merge(a);
    Histogram ab = a;
    ab.merge(b);
    CHECK(ab == ba);
    Histogram ae = a;
    ae.merge(empty);
    CHECK(ae == a);
  }
  Histogram other = Histogram::fixed_width(0, 1, 30);
  Histogram mine = empty;
  CHECK_THROWS_AS(mine.merge(other), Error);
}

TEST_CASE("perimeter histogram of one equilateral triangle") {
  TriangleMesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
  tri.triangles = {{0, 1, 2}};
  const std::vector<TriangleMesh> corpus{tri};
  const Histogram h = perimeter_histogram(corpus, BinSpec{});
  CHECK(h.n == 1);
  CHECK(h.counts[h.bin_of(3.0)] == 1);
  CHECK(code_of([&] { perimeter_histogram(std::span<const TriangleMesh>{}, BinSpec{}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("perimeter histograms of two meshes add") {
  Rng rng(2);
  const std::vector<TriangleMesh> a{make_icosphere(2, 1.0, &rng, 0.1)};
  const std::vector<TriangleMesh> b{make_random_convex(rng, 40, 2.0)};
  const std::vector<TriangleMesh> both{a[0], b[0]};
  Histogram sum = perimeter_histogram(a, BinSpec{});
  sum.merge(perimeter_histogram(b, BinSpec{}));
  CHECK(perimeter_histogram(both, BinSpec{}) == sum);
  CHECK(perimeter_histogram(both, BinSpec{}, {}, Exec::kSerial) == sum);
}

TEST_CASE("gamma samples peak near (k-1)*theta") {
  Rng rng(3);
  std::vector<double> x(100000);
  for (double& v : x) v = rng.gamma(2.0, 0.5);
  BinSpec spec;
  spec.policy = BinPolicy::kFixedWidth;
  spec.lo = 0.0;
  spec.hi = 5.0;
  spec.bins = 50;
  const Histogram h = histogram_of(x, spec);
  const std::size_t mode = h.mode_bin();
  const double centre = 0.5 * (h.edges[mode] + h.edges[mode + 1]);
  CHECK(std::abs(centre - 0.5) <= 0.1 + 1e-12);
}

TEST_CASE("gamma fit recovers shape and scale") {
  Rng rng(42);
  std::vector<double> x(100000);
  for (double& v : x) v = rng.gamma(2.0, 0.5);
  const GammaFit fit = fit_gamma(x);
  CHECK(fit.converged);
  CHECK(fit.shape >= 1.96);
  CHECK(fit.shape <= 2.04);
  CHECK(fit.scale >= 0.49);
  CHECK(fit.scale <= 0.51);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  CHECK(std::abs(fit.shape * fit.scale - mean) <= 1e-9 * mean);

  std::vector<double> e(100000);
  for (double& v : e) v = rng.exponential(1.5);
  const GammaFit efit = fit_gamma(e);
  CHECK(std::abs(efit.shape - 1.0) <= 0.02);
}

TEST_CASE("gamma fit input errors") {
  CHECK(code_of([] { fit_gamma(std::vector<double>{1.0}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { fit_gamma(std::vector<double>{1.0, 0.0, 2.0}); }) == ErrorCode::kNonPositiveSample);
  CHECK(code_of([] { fit_gamma(std::vector<double>{1.0, -2.0}); }) == ErrorCode::kNonPositiveSample);
  CHECK(code_of([] { fit_gamma(std::vector<double>{3.0, 3.0, 3.0}); }) == ErrorCode::kZeroVariance);
}

TEST_CASE("gamma log density") {
  // k = 1 is the exponential density.
  CHECK(gamma_log_pdf(0.7, 1.0, 2.0) == doctest::Approx(std::log(0.5) - 0.35));
  CHECK(gamma_log_pdf(1.0, 2.0, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("seeded generator streams are reproducible") {
  Rng a(9), b(9);
  for (int i = 0; i < 1000; ++i) CHECK(a.gamma(0.7, 2.0) == b.gamma(0.7, 2.0));
  Rng c(10);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7);
  }
}

TEST_CASE("plots and text exports") {
  Rng rng(4);
  std::vector<double> x(2000);
  for (double& v : x) v = rng.gamma(2.0, 0.5);
  const Histogram h = histogram_of(x, BinSpec{});
  const GammaFit fit = fit_gamma(x);
  const std::string svg = histogram_svg(h, fit, "perimeters");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(histogram_svg(h, std::nullopt, "p").find("<polyline") == std::string::npos);
  const std::string csv = h.to_csv();
  CHECK(csv.rfind("lo,hi,count\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == h.counts.size() + 1);
  CHECK(gamma_fit_text(fit).find("shape") != std::string::npos);
  CHECK(to_json(fit).at("shape").get<double>() == fit.shape);
}

TEST_CASE("marching cubes table covers every case consistently") {
  const auto& table = marching_cubes_table();
  CHECK(table[0].empty());
  CHECK(table[255].empty());
  for (int mask = 1; mask < 255; ++mask) CHECK_FALSE(table[mask].empty());
}

TEST_CASE("marching-cubes spheres are watertight and consistently oriented") {
  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const double radius = rng.uniform(0.5, 2.0);
    const Vec3 c{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    GridSpec g;
    g.spacing = radius / rng.uniform(4.0, 10.0);
    const auto n = static_cast<std::uint32_t>(std::ceil(2.6 * radius / g.spacing)) + 2;
    g.dims = {n, n, n};
    g.origin = c - Vec3{1.3 * radius + g.spacing * rng.uniform(0, 1), 1.3 * radius, 1.3 * radius + 0.37 * g.spacing};
    const TriangleMesh m =
        marching_cubes([&](const Vec3& p) { return sphere_field(p, c, radius); }, g);
    const MeshAdjacency adj(m);
    const MeshStats s = compute_stats(m, adj);
    CHECK(s.watertight);
    CHECK(s.consistent_normals);
    REQUIRE(s.volume);
    CHECK(*s.volume == doctest::Approx(4.0 / 3.0 * std::numbers::pi * radius * radius * radius).epsilon(0.1));
  }
}

TEST_CASE("tangent-aligned torus produces slivers; offset torus does not") {
  const TriangleMesh aligned = make_torus(1.0, 0.25, 12, {});
  const DegenerateTolerances tol;
  std::set<std::uint32_t> flagged;
  for (const DegenerateFacet& d : detect_degenerate(aligned, tol)) flagged.insert(d.triangle);
  std::size_t slivers = 0;
  for (std::uint32_t t = 0; t < aligned.triangles.size(); ++t) {
    const Triangle& tri = aligned.triangles[t];
    const double q = measure_triangle(aligned.vertices[tri[0]], aligned.vertices[tri[1]], aligned.vertices[tri[2]]).quality;
    if (q < 1e-3) ++slivers;
    if (q < tol.quality_tol) CHECK(flagged.count(t) == 1);
  }
  CHECK(slivers > 0);
  const BagBuild b = build_bag_detailed(aligned, {});
  CHECK_FALSE(b.bag.empty());
  for (const LocalFeature& f : b.features) {
    CHECK(std::isfinite(f.perimeter));
    CHECK(std::isfinite(f.quality));
    CHECK(f.quality >= WordConfig{}.degenerate.quality_tol);
  }

  const TriangleMesh shifted = make_torus(1.0, 0.25, 12, {0.37, 0.21, 0.43});
  const WeldResult w = weld_vertices(shifted, 1e-9);
  const MeshStats s = compute_stats(w.mesh, w.adjacency);
  CHECK(s.watertight);
  CHECK(s.consistent_normals);
}

TEST_CASE("primitive generators are closed, consistent, positive volume") {
  Rng rng(6);
  std::vector<TriangleMesh> shapes{make_box(Vec3{1, 2, 3}), make_prism(7, 1.0, 2.0), make_icosphere(2, 1.0, &rng, 0.15),
                                   make_random_convex(rng, 30, 1.0), make_torus(1.0, 0.3, 4, {0.3, 0.2, 0.1})};
  for (const TriangleMesh& m : shapes) {
    const WeldResult w = weld_vertices(m, 1e-9);
    const MeshStats s = compute_stats(w.mesh, w.adjacency);
    CHECK(s.watertight);
    CHECK(s.consistent_normals);
    REQUIRE(s.volume);
    CHECK(*s.volume > 0.0);
  }
  CHECK(*volume_of(make_box(Vec3{1, 2, 3})) == doctest::Approx(6.0));
}

TEST_CASE("support lattice") {
  const TriangleMesh lattice = gen_support_lattice(LatticeSpec{}, 1);
  CHECK(lattice.triangles.size() == 12 * (1 + 16));
  CHECK(*volume_of(lattice) == doctest::Approx(8.0 * 8.0 * 0.5 + 16 * 0.25 * 0.25 * 3.0));
  CHECK(gen_support_lattice(LatticeSpec{}, 1) == lattice);
}

TEST_CASE("dyadic snapping and rigid transforms") {
  const double step = std::ldexp(1.0, -kDyadicBits);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.uniform(-50, 50);
    const double s = snap_dyadic(v);
    CHECK(std::abs(s - v) <= step / 2);
    CHECK(std::floor(s / step) == s / step);
  }
  const TriangleMesh m = make_random_convex(rng, 20, 1.0);
  const double vol = *volume_of(m);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = random_signed_permutation(rng);
    const auto v = volume_of(transform(m, t));
    REQUIRE(v);
    CHECK(*v == doctest::Approx(vol).epsilon(1e-12));
  }
}

TEST_CASE("TTD: deterministic, labeled, and parts are sub-bags of composites") {
  TTDSpec spec;
  spec.composites = 25;
  spec.distractors = 10;
  spec.seed = 7;
  const TTDCorpus a = gen_ttd(spec);
  const TTDCorpus b = gen_ttd(spec);
  REQUIRE(a.composites.size() == 25);
  CHECK(a.distractors.size() == 10);
  REQUIRE(a.labels.size() == 25);
  for (std::size_t i = 0; i < a.composites.size(); ++i) CHECK(a.composites[i].mesh == b.composites[i].mesh);

  std::set<std::string> families;
  for (const TTDItem& p : a.parts) families.insert(p.family);
  CHECK(families.size() == 5);

  std::map<std::string, const TTDItem*> by_id;
  for (const auto* group : {&a.parts, &a.composites}) {
    for (const TTDItem& item : *group) by_id[item.id] = &item;
  }
  const WordConfig cfg;
  for (const TTDLabel& label : a.labels) {
    const WordBag composite = build_bag(by_id.at(label.composite_id)->mesh, cfg);
    for (const std::string& part_id : label.part_ids) {
      const WordBag part = build_bag(by_id.at(part_id)->mesh, cfg);
      for (const WordCount& wc : part.words) {
        if (!is_global(wc.word)) CHECK(wc.count <= composite.count(wc.word));
      }
      CHECK(score_containment(part, composite, WeightTable{}) == 1.0);
    }
  }

  const Json labels = Json::parse(labels_json(a));
  CHECK(labels.at("labels").size() == 25);
  CHECK(TTDSpec::from_json(spec.to_json()).to_json() == spec.to_json());
  TTDSpec bad = spec;
  bad.composites = -1;
  CHECK_THROWS_AS(bad.validate(), Error);

  test::TempDir dir;
  write_ttd(a, dir.str());
  CHECK(std::filesystem::exists(dir.file("labels.json")));
  const auto back = parse_mesh(read_file(dir.file("composites/" + a.composites[0].id + ".stl")), "stl").mesh;
  CHECK(build_bag(back, cfg) == build_bag(a.composites[0].mesh, cfg));
}

}  // TEST_SUITE
