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
#include <httplib.h>

#include <map>
#include <string>

#include "gw3d/generators.hpp"
#include "gw3d/mesh_io.hpp"
#include "gw3d/service.hpp"
#include "gw3d/ttd.hpp"
#include "support.hpp"

using namespace gw3d;

namespace {

constexpr std::int64_t kNow = 1'800'000'000;

CatalogConfig fixed_clock() {
  CatalogConfig c;
  c.clock = [] { return kNow; };
  return c;
}

std::string bytes_str(const std::vector<std::uint8_t>& b) { return {b.begin(), b.end()}; }

std::string stl_of(const TriangleMesh& m) { return bytes_str(write_stl_binary(m, "part")); }

// Running service on a free port around an in-memory repository.
struct Server {
  Repository repo;
  Service service;
  int port;
  httplib::Client client;

  explicit Server(ApiConfig cfg = {}, CatalogConfig catalog = fixed_clock())
      : repo(Catalog(std::move(catalog))), service(repo, with_any_port(cfg)), port(service.start()),
        client("127.0.0.1", port) {
    client.set_read_timeout(60, 0);
  }

  static ApiConfig with_any_port(ApiConfig cfg) {
    cfg.port = 0;
    return cfg;
  }

  httplib::Result upload(const std::string& path, const std::string& body, const std::string& filename,
                         const std::map<std::string, std::string>& fields = {}) {
    httplib::MultipartFormDataItems items{{"file", body, filename, "application/octet-stream"}};
    for (const auto& [k, v] : fields) items.push_back({k, v, "", ""});
    return client.Post(path, items);
  }
};

Json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return Json::parse(r->body);
}

std::string error_code(const httplib::Result& r) { return body_of(r).at("error").at("code").get<std::string>(); }

}  // namespace

TEST_SUITE("api_service") {

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::kParse) == 400);
  CHECK(http_status(ErrorCode::kEmptyBag) == 400);
  CHECK(http_status(ErrorCode::kQueryTooGeneric) == 400);
  CHECK(http_status(ErrorCode::kNotFound) == 404);
  CHECK(http_status(ErrorCode::kAlreadyExists) == 409);
  CHECK(http_status(ErrorCode::kGone) == 410);
  CHECK(http_status(ErrorCode::kTooLarge) == 413);
  CHECK(http_status(ErrorCode::kChecksum) == 503);
  CHECK(http_status(ErrorCode::kInternal) == 500);
}

TEST_CASE("parameter parsing") {
  CHECK(parse_k("1") == 1);
  CHECK(parse_k("1000") == 1000);
  CHECK_THROWS_AS(parse_k("0"), Error);
  CHECK_THROWS_AS(parse_k("1001"), Error);
  CHECK_THROWS_AS(parse_k("ten"), Error);
  CHECK_THROWS_AS(parse_k("5x"), Error);
  const Filters f = parse_filters({{"watertight", "true"}, {"normals", "0"}, {"filetype", "stl"}, {"source", ""}});
  CHECK(f.watertight == std::optional<bool>(true));
  CHECK(f.consistent_normals == std::optional<bool>(false));
  CHECK(f.filetype == std::optional<std::string>("stl"));
  CHECK_FALSE(f.source_domain);
  CHECK_THROWS_AS(parse_filters({{"watertight", "maybe"}}), Error);
  ApiConfig bad;
  bad.max_upload_bytes = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("upload, fetch, delete") {
  Server s;
  const TriangleMesh cube = test::unit_cube();
  auto r = s.upload("/v1/models", stl_of(cube), "cube.stl", {{"name", "cube"}, {"tags", "box, solid"}});
  REQUIRE(r);
  CHECK(r->status == 201);
  const Json created = body_of(r);
  CHECK(created.at("created") == true);
  const std::string id = created.at("record").at("id");
  CHECK(created.at("record").at("tags") == Json::array({"box", "solid"}));

  auto g = s.client.Get("/v1/models/" + id);
  REQUIRE(g);
  CHECK(g->status == 200);
  CHECK(body_of(g).at("content_hash") == canonical_hash(cube).hex());
  CHECK(body_of(g).at("filetype") == "stl-binary");

  auto again = s.upload("/v1/models", stl_of(test::permuted(cube, 3)), "copy.stl", {{"source", "mirror.example"}});
  REQUIRE(again);
  CHECK(again->status == 200);
  CHECK(body_of(again).at("merged_with").at("model_id") == id);

  auto d = s.client.Delete("/v1/models/" + id);
  REQUIRE(d);
  CHECK(d->status == 200);
  CHECK(body_of(d).at("state") == "taken_down");
  auto gone = s.client.Get("/v1/models/" + id);
  REQUIRE(gone);
  CHECK(gone->status == 410);
  CHECK(error_code(gone) == "gone");
  auto twice = s.client.Delete("/v1/models/" + id);
  REQUIRE(twice);
  CHECK(twice->status == 410);
}

TEST_CASE("error responses") {
  ApiConfig cfg;
  cfg.max_upload_bytes = 4096;
  Server s(cfg);
  auto missing = s.client.Get("/v1/models/m000000000000");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(error_code(missing) == "not_found");

  auto route = s.client.Get("/v1/nothing-here");
  REQUIRE(route);
  CHECK(route->status == 404);

  auto big = s.upload("/v1/models", stl_of(make_icosphere(3, 1.0)), "ball.stl");
  REQUIRE(big);
  CHECK(big->status == 413);
  CHECK(error_code(big) == "too_large");

  auto huge = s.upload("/v1/models", std::string(std::size_t{3} << 20, 'x'), "big.stl");
  REQUIRE(huge);
  CHECK(huge->status == 413);

  auto junk = s.upload("/v1/models", "solid x\nfacet nonsense\n", "junk.stl");
  REQUIRE(junk);
  CHECK(junk->status == 400);
  CHECK(error_code(junk) == "parse_error");

  auto no_file = s.client.Post("/v1/search/similar", "{}", "application/json");
  REQUIRE(no_file);
  CHECK(no_file->status == 400);

  const std::string cube = stl_of(test::unit_cube());
  REQUIRE(s.upload("/v1/models", cube, "cube.stl")->status == 201);
  auto bad_k = s.upload("/v1/search/similar", cube, "q.stl", {{"k", "0"}});
  REQUIRE(bad_k);
  CHECK(bad_k->status == 400);
  CHECK(error_code(bad_k) == "invalid_argument");
  auto bad_filter = s.client.Get("/v1/search/text?q=cube&watertight=perhaps");
  REQUIRE(bad_filter);
  CHECK(bad_filter->status == 400);
}

TEST_CASE("part-in-part search finds the composite") {
  TTDSpec spec;
  spec.composites = 10;
  spec.distractors = 10;
  spec.seed = 11;
  const TTDCorpus corpus = gen_ttd(spec);
  Server s;
  std::map<std::string, std::string> model_of;
  for (const auto* group : {&corpus.composites, &corpus.distractors}) {
    for (const TTDItem& item : *group) {
      IngestRequest in;
      in.bytes = write_stl_binary(item.mesh, item.id);
      in.name = item.id;
      in.source = {"ttd.example", "https://ttd.example/" + item.id};
      model_of[item.id] = s.repo.catalog.ingest(in).record.id;
    }
  }
  std::map<std::string, const TTDItem*> parts;
  for (const TTDItem& p : corpus.parts) parts[p.id] = &p;
  for (const TTDLabel& label : corpus.labels) {
    auto r = s.upload("/v1/search/pip", stl_of(parts.at(label.part_ids[0])->mesh), "part.stl", {{"k", "50"}});
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const Json results = body_of(r).at("results");
    REQUIRE_FALSE(results.empty());
    CHECK(results[0].at("score").get<double>() == 1.0);
    bool found = false;
    for (const Json& hit : results) {
      if (hit.at("model_id") == model_of.at(label.composite_id)) found = hit.at("score").get<double>() == 1.0;
    }
    CHECK(found);
  }
}

TEST_CASE("related lists stay coherent across takedowns") {
  Server s;
  Rng rng(5);
  std::vector<std::string> ids;
  const TriangleMesh base = make_random_convex(rng, 30, 1.0);
  for (int i = 0; i < 8; ++i) {
    TriangleMesh m = base;
    m.append(translate(make_random_convex(rng, 12, 0.5), {4, 0, 0}));
    snap_dyadic(m);
    auto r = s.upload("/v1/models", stl_of(m), "m.stl", {{"source", "site" + std::to_string(i) + ".example"}});
    REQUIRE(r);
    REQUIRE(r->status == 201);
    ids.push_back(body_of(r).at("record").at("id"));
  }
  auto rel = s.client.Get("/v1/models/" + ids[1] + "/related");
  REQUIRE(rel);
  bool had_zero = false;
  const Json before = body_of(rel);
  for (const Json& hit : before.at("results")) had_zero |= hit.at("model_id") == ids[0];
  CHECK(had_zero);

  REQUIRE(s.client.Delete("/v1/models/" + ids[0])->status == 200);
  CHECK_FALSE(s.service.related_cache().contains(ids[0]));
  for (std::size_t i = 1; i < ids.size(); ++i) {
    auto r = s.client.Get("/v1/models/" + ids[i] + "/related");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const Json after = body_of(r);
    for (const Json& hit : after.at("results")) {
      CHECK(hit.at("model_id") != ids[0]);
      CHECK(hit.at("model_id") != ids[i]);
    }
  }
  for (const auto& [id, results] : s.service.related_cache().snapshot()) {
    for (const SearchResult& hit : results) CHECK(hit.model_id != ids[0]);
  }
  auto gone = s.client.Get("/v1/models/" + ids[0] + "/related");
  REQUIRE(gone);
  CHECK(gone->status == 410);
}

TEST_CASE("stats and health") {
  Server s;
  CHECK(body_of(s.client.Get("/v1/healthz")) == Json{{"status", "ok"}});
  REQUIRE(s.upload("/v1/models", stl_of(test::unit_cube()), "cube.stl")->status == 201);
  const Json st = body_of(s.client.Get("/v1/stats"));
  CHECK(st.at("records") == 1);
  CHECK(st.at("active_models") == 1);
  CHECK(st.at("indexed_models") == 1);
  CHECK(st.at("distinct_words") == 5);
  CHECK(st.at("df").at("max") == 1);
}

TEST_CASE("API responses equal direct module calls") {
  // The same operations through HTTP and through the library must produce
  // byte-identical JSON.
  Server s;
  Catalog direct(fixed_clock());
  RelatedCache related(ApiConfig{}.related_k);
  Rng rng(17);
  std::vector<TriangleMesh> meshes;
  for (int i = 0; i < 6; ++i) {
    TriangleMesh m = make_random_convex(rng, 20, 1.0);
    snap_dyadic(m);
    meshes.push_back(m);
  }
  meshes.push_back(test::unit_cube());
  meshes.push_back(meshes[2]);  // duplicate

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const std::string bytes = stl_of(meshes[i]);
    const std::string name = "mesh" + std::to_string(i);
    auto r = s.upload("/v1/models", bytes, name + ".stl", {{"name", name}, {"source", "a.example"}, {"tags", "t1,t2"}});
    REQUIRE(r);
    IngestRequest in;
    in.bytes = write_stl_binary(meshes[i], "part");
    in.format_hint = "stl";
    in.name = name;
    in.tags = {"t1", "t2"};
    in.source = {"a.example", std::string(kInternalUpload)};
    in.actor = "api";
    const IngestResult res = direct.ingest(in);
    CHECK(r->body == ingest_json(res).dump());
    ids.push_back(res.record.id);
  }

  for (const std::string& id : ids) {
    CHECK(s.client.Get("/v1/models/" + id)->body == model_json(direct.record(id)).dump());
    CHECK(s.client.Get("/v1/models/" + id + "/related")->body == related_json(id, related.get(direct, id)).dump());
  }
  for (SearchMode mode : {SearchMode::kSimilar, SearchMode::kPip}) {
    SearchQuery q;
    q.mode = mode;
    q.k = 5;
    q.bag = direct.query_bag(write_stl_binary(meshes[1], "part"), "stl");
    const std::string path = mode == SearchMode::kPip ? "/v1/search/pip" : "/v1/search/similar";
    auto r = s.upload(path, stl_of(meshes[1]), "q.stl", {{"k", "5"}});
    CHECK(r->body == search_json(mode, 5, run_query(direct.index(), direct, q)).dump());
  }
  CHECK(s.client.Get("/v1/search/text?q=mesh3&k=3")->body ==
        search_json(SearchMode::kText, 3, text_search(direct, "mesh3", 3)).dump());

  direct.take_down(ids[0], "api");
  CHECK(s.client.Delete("/v1/models/" + ids[0])->body == takedown_json(direct.record(ids[0])).dump());
  CHECK(s.client.Get("/v1/stats")->body == stats_json(direct).dump());
}

}  // TEST_SUITE
