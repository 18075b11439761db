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
#include <cstring>

#include "gw3d/canonical_hash.hpp"
#include "gw3d/error.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/mesh_io.hpp"
#include "support.hpp"

using namespace gw3d;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_SUITE("mesh_core") {

TEST_CASE("binary STL with one triangle") {
  const auto bytes = write_stl_binary(test::single_triangle());
  CHECK(bytes.size() == 84 + 50);
  const TriangleMesh m = parse_stl(bytes);
  CHECK(m.vertices.size() == 3);
  REQUIRE(m.triangles.size() == 1);
  CHECK(m.vertices[1] == Vec3{1, 0, 0});
  CHECK(parse_stl_detect(bytes).format == MeshFormat::kStlBinary);
}

TEST_CASE("empty ASCII solid parses to zero triangles") {
  const auto parsed = parse_stl_detect(bytes_of("solid a\nendsolid a"));
  CHECK(parsed.format == MeshFormat::kStlAscii);
  CHECK(parsed.mesh.triangles.empty());
}

TEST_CASE("truncated binary STL reports the record") {
  TriangleMesh ten;
  for (int i = 0; i < 10; ++i) ten.append(test::single_triangle());
  auto bytes = write_stl_binary(ten);
  bytes.resize(84 + 5 * 50);
  try {
    parse_stl(bytes);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("truncated at record 5") != std::string::npos);
    CHECK(e.unit() == ParseError::Unit::kByte);
  }
}

TEST_CASE("ASCII STL round trip") {
  const TriangleMesh tet = test::tetrahedron();
  const auto parsed = parse_mesh(bytes_of(write_stl_ascii(tet)), "");
  CHECK(parsed.format == MeshFormat::kStlAscii);
  CHECK(parsed.mesh == test::soup(tet));
}

TEST_CASE("binary STL parse-serialize round trip is exact") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    TriangleMesh m = make_random_convex(rng, 20, 1.0);
    for (Vec3& v : m.vertices) v = {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
    const TriangleMesh first = parse_stl(write_stl_binary(m));
    const TriangleMesh second = parse_stl(write_stl_binary(first));
    CHECK(first == second);
  }
}

TEST_CASE("OBJ triangle, quad fan and bad index") {
  const TriangleMesh one = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3");
  CHECK(one.triangles.size() == 1);

  const TriangleMesh quad = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  REQUIRE(quad.triangles.size() == 2);
  CHECK(quad.triangles[0] == Triangle{0, 1, 2});
  CHECK(quad.triangles[1] == Triangle{0, 2, 3});

  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.unit() == ParseError::Unit::kLine);
    CHECK(e.position() == 4);
  }
}

TEST_CASE("OBJ round trip and format sniffing") {
  const TriangleMesh cube = test::unit_cube();
  const std::string text = write_obj(cube);
  const auto parsed = parse_mesh(bytes_of(text), "");
  CHECK(parsed.format == MeshFormat::kObj);
  CHECK(parsed.mesh == cube);
}

TEST_CASE("welding shared edge of two triangles") {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}, {3, 4, 5}};
  const WeldResult w = weld_vertices(m, 1e-9);
  CHECK(w.mesh.vertices.size() == 4);
  CHECK(w.dropped.empty());
  CHECK(w.adjacency.neighbors()[0][1] == 1);  // edge (1,2) of triangle 0
  CHECK(w.adjacency.incident(1, 2).size() == 2);

  const WeldResult exact = weld_vertices(m, 0.0);
  CHECK(exact.mesh.vertices.size() == 4);
}

TEST_CASE("sliver collapsed by welding is reported") {
  TriangleMesh m = test::single_triangle();
  const double eps = 1e-9;
  const double cell = eps * std::sqrt(3.0);  // bbox below is the unit cube
  const auto base = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.push_back({0.1 * cell, 0.1 * cell, 0.1 * cell});
  m.vertices.push_back({0.6 * cell, 0.1 * cell, 0.1 * cell});
  m.vertices.push_back({1, 1, 1});
  m.triangles.push_back({base, base + 1, base + 2});
  REQUIRE(m.bounds().diagonal() == doctest::Approx(std::sqrt(3.0)));
  const WeldResult w = weld_vertices(m, eps);
  CHECK(w.dropped == std::vector<std::uint32_t>{1});
  CHECK(w.mesh.triangles.size() == 1);
}

TEST_CASE("weld is idempotent") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const TriangleMesh m = test::soup(make_icosphere(2, 1.0, &rng, 0.1));
    const WeldResult once = weld_vertices(m, 1e-9);
    const WeldResult twice = weld_vertices(once.mesh, 1e-9);
    CHECK(twice.mesh == once.mesh);
    CHECK(twice.dropped.empty());
  }
}

TEST_CASE("tetrahedron statistics") {
  const TriangleMesh tet = test::tetrahedron();
  const MeshStats s = compute_stats(tet, MeshAdjacency(tet));
  CHECK(s.watertight);
  CHECK(s.consistent_normals);
  CHECK(s.surface_area == doctest::Approx(1.5 + std::sqrt(3.0) / 2.0).epsilon(1e-14));
  REQUIRE(s.volume);
  CHECK(*s.volume == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("single triangle is open; flipped face breaks consistency") {
  const TriangleMesh tri = test::single_triangle();
  CHECK_FALSE(compute_stats(tri, MeshAdjacency(tri)).watertight);

  TriangleMesh flipped = test::tetrahedron();
  std::swap(flipped.triangles[3][1], flipped.triangles[3][2]);
  const MeshStats s = compute_stats(flipped, MeshAdjacency(flipped));
  CHECK(s.watertight);
  CHECK_FALSE(s.consistent_normals);
  CHECK_FALSE(s.volume);
}

TEST_CASE("volume invariant under triangle reordering") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const TriangleMesh m = make_random_convex(rng, 30, 2.0);
    const MeshStats a = compute_stats(m, MeshAdjacency(m));
    REQUIRE(a.volume);
    const TriangleMesh p = test::permuted(m, 1000 + trial);
    const MeshStats b = compute_stats(p, MeshAdjacency(p));
    REQUIRE(b.volume);
    CHECK(*b.volume == doctest::Approx(*a.volume).epsilon(1e-12));
  }
}

TEST_CASE("degenerate detection") {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}, {0.5, 1e-9, 0}};
  m.triangles = {{0, 1, 0}, {0, 1, 2}, {0, 1, 3}};
  const auto flagged = detect_degenerate(m);
  REQUIRE(flagged.size() == 2);
  CHECK(flagged[0].triangle == 0);
  CHECK(flagged[0].reason == DegenerateReason::kRepeatedVertex);
  CHECK(measure_triangle(m.vertices[0], m.vertices[1], m.vertices[0]).area == 0.0);
  CHECK(flagged[1].triangle == 2);
  CHECK(flagged[1].reason == DegenerateReason::kSliver);

  // q = 4*sqrt(3)*A/p^2 evaluated by hand for the needle.
  const double area = 0.5 * 1.0 * 1e-9;
  const double p = 1.0 + 2.0 * std::hypot(0.5, 1e-9);
  const double q = 4.0 * std::sqrt(3.0) * area / (p * p);
  CHECK(q == doctest::Approx(8.660254037844386e-10).epsilon(1e-9));
  CHECK(measure_triangle(m.vertices[0], m.vertices[1], m.vertices[3]).quality == doctest::Approx(q).epsilon(1e-6));
  CHECK(measure_triangle(m.vertices[0], m.vertices[1], m.vertices[2]).quality == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("injected zero-area triangles are always flagged, equilateral never") {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    TriangleMesh m = make_icosphere(1, 1.0, &rng, 0.05);
    const auto n = static_cast<std::uint32_t>(m.vertices.size());
    const Vec3 a = m.vertices[rng.below(n)];
    const Vec3 b = m.vertices[rng.below(n)];
    m.vertices.push_back(0.5 * (a + b));  // collinear with a and b
    const auto mid = static_cast<std::uint32_t>(m.vertices.size() - 1);
    const auto ia = static_cast<std::uint32_t>(std::find(m.vertices.begin(), m.vertices.end(), a) - m.vertices.begin());
    const auto ib = static_cast<std::uint32_t>(std::find(m.vertices.begin(), m.vertices.end(), b) - m.vertices.begin());
    m.triangles.push_back({ia, mid, ib});
    const auto flagged = detect_degenerate(m);
    const bool found = std::any_of(flagged.begin(), flagged.end(), [&](const DegenerateFacet& d) {
      return d.triangle == m.triangles.size() - 1;
    });
    CHECK(found);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const double s = std::exp(rng.uniform(-5.0, 5.0));
    TriangleMesh eq;
    eq.vertices = {{0, 0, 0}, {s, 0, 0}, {0.5 * s, s * std::sqrt(3.0) / 2.0, 0}};
    eq.triangles = {{0, 1, 2}};
    CHECK(detect_degenerate(eq).empty());
  }
}

TEST_CASE("canonical hash ignores triangle order and vertex numbering") {
  const TriangleMesh cube = test::unit_cube();
  const ContentHash h = canonical_hash(cube);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CHECK(canonical_hash(test::permuted(cube, seed)) == h);
  }
  CHECK(canonical_hash(translate(cube, {1, 0, 0})) != h);
  CHECK(ContentHash::from_hex(h.hex()) == h);
  CHECK(h.hex().size() == 64);
}

TEST_CASE("sha256 known answer") {
  const std::string abc = "abc";
  const auto d = sha256({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()});
  ContentHash h;
  h.digest = d;
  CHECK(h.hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("mesh validation rejects bad indices and non-finite coordinates") {
  TriangleMesh m = test::single_triangle();
  m.triangles.push_back({0, 1, 7});
  CHECK(code_of([&] { m.validate(); }) == ErrorCode::kInvalidArgument);
  TriangleMesh n = test::single_triangle();
  n.vertices[0].x = std::nan("");
  CHECK(code_of([&] { n.validate(); }) == ErrorCode::kInvalidArgument);
}

}  // TEST_SUITE
