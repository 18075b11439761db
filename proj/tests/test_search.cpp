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

#include "gw3d/error.hpp"
#include "gw3d/generators.hpp"
#include "gw3d/index.hpp"
#include "gw3d/scoring.hpp"
#include "gw3d/search.hpp"
#include "support.hpp"

using namespace gw3d;

namespace {

WordBag bag_of(std::string id, std::vector<WordCount> words) {
  WordBag b;
  b.model_id = std::move(id);
  for (const WordCount& wc : words) b.add(wc.word, wc.count);
  return b;
}

// In-memory stand-in for the catalog.
struct FakeCatalog : CatalogView {
  std::map<std::string, bool> watertight;
  std::map<std::string, std::string> texts;
  std::set<std::string> gone;

  bool accepts(const std::string& id, const Filters& f) const override {
    if (gone.contains(id)) return false;
    if (f.watertight && watertight.at(id) != *f.watertight) return false;
    return true;
  }
  Provenance provenance(const std::string& id) const override {
    return id.starts_with("int") ? Provenance::kInternal : Provenance::kExternal;
  }
  void for_each_text(const std::function<void(const std::string&, const std::string&)>& fn) const override {
    for (const auto& [id, text] : texts) {
      if (!gone.contains(id)) fn(id, text);
    }
  }
};

WordBag random_bag(Rng& rng, const std::string& id, int vocabulary, int words) {
  WordBag b;
  b.model_id = id;
  for (int j = 0; j < words; ++j) {
    WordId w = 1 + rng.below(vocabulary);
    if (rng.below(8) == 0) w |= kGlobalWordBit;
    b.add(w, 1 + static_cast<std::uint32_t>(rng.below(5)));
  }
  return b;
}

void check_same(const std::vector<SearchResult>& got, const std::vector<SearchResult>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].model_id == want[i].model_id);
    CHECK(std::abs(got[i].score - want[i].score) <= 1e-12);
  }
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("similarity examples") {
  const WeightTable ones;
  const WordBag q = bag_of("q", {{1, 1}});
  const WordBag t = bag_of("t", {{1, 1}, {2, 1}});
  CHECK(score_similarity(t, t, ones) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(score_similarity(q, bag_of("d", {{3, 4}}), ones) == 0.0);
  CHECK(score_similarity(q, t, ones) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(score_similarity(q, bag_of("z", {}), ones) == 0.0);
}

TEST_CASE("containment examples") {
  const WeightTable ones;
  CHECK(score_containment(bag_of("q", {{1, 2}}), bag_of("t", {{1, 1}}), ones) == 0.5);
  CHECK(score_containment(bag_of("q", {{1, 2}}), bag_of("t", {{2, 1}}), ones) == 0.0);
  CHECK(score_containment(bag_of("q", {{1, 2}, {2, 1}}), bag_of("t", {{1, 3}, {2, 1}, {5, 9}}), ones) == 1.0);
  // Global words do not count toward containment.
  CHECK(score_containment(bag_of("q", {{1, 1}, {kGlobalWordBit | 4, 1}}), bag_of("t", {{1, 1}}), ones) == 1.0);
  try {
    score_containment(bag_of("q", {{kGlobalWordBit | 4, 1}}), bag_of("t", {{1, 1}}), ones);
    FAIL("expected too-generic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kQueryTooGeneric);
  }
}

TEST_CASE("scores are symmetric (similarity), bounded, and containment is monotone") {
  Rng rng(1);
  WeightTable w;
  for (WordId i = 1; i <= 30; ++i) w.weights[i] = rng.uniform(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const WordBag a = random_bag(rng, "a", 30, 8);
    const WordBag b = random_bag(rng, "b", 30, 8);
    const double ab = score_similarity(a, b, w), ba = score_similarity(b, a, w);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-15));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    if (containment_denominator(a, w) <= 0.0) continue;
    const double c = score_containment(a, b, w);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    WordBag bigger = b;
    bigger.add(1 + rng.below(30), 1 + static_cast<std::uint32_t>(rng.below(3)));
    CHECK(score_containment(a, bigger, w) >= c);
  }
}

TEST_CASE("indexed model ranks first for itself") {
  Rng rng(2);
  InvertedIndex idx;
  std::vector<TriangleMesh> meshes;
  for (int i = 0; i < 30; ++i) {
    meshes.push_back(make_random_convex(rng, 12 + i, 1.0));
    WordBag b = build_bag(meshes.back(), idx.config());
    b.model_id = "m" + std::to_string(i);
    idx.insert(b);
  }
  for (int i = 0; i < 30; ++i) {
    SearchQuery q;
    q.bag = build_bag(meshes[i], idx.config());
    q.k = 5;
    const auto r = query_similar(idx, nullptr, q);
    REQUIRE_FALSE(r.empty());
    CHECK(r[0].model_id == "m" + std::to_string(i));
    CHECK(r[0].score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.size() <= 5);
    CHECK(std::is_sorted(r.begin(), r.end(), result_before));
  }
}

TEST_CASE("rigidly moved query keeps the same best match") {
  Rng rng(3);
  InvertedIndex idx;
  std::vector<TriangleMesh> meshes;
  for (int i = 0; i < 25; ++i) {
    TriangleMesh m = make_random_convex(rng, 20 + i, 1.0);
    snap_dyadic(m);
    meshes.push_back(m);
    WordBag b = build_bag(m, idx.config());
    b.model_id = "m" + std::to_string(i);
    idx.insert(b);
  }
  for (int i = 0; i < 25; ++i) {
    SearchQuery q;
    q.k = 3;
    q.bag = build_bag(meshes[i], idx.config());
    const auto base = query_similar(idx, nullptr, q);
    q.bag = build_bag(translate(transform(meshes[i], random_signed_permutation(rng)), {3.0, -1.5, 0.25}), idx.config());
    const auto moved = query_similar(idx, nullptr, q);
    check_same(moved, base);
    q.bag = build_bag(rotate(meshes[i], {1.0, 2.0, 0.5}, 0.7), idx.config());
    const auto rotated = query_similar(idx, nullptr, q);
    REQUIRE_FALSE(rotated.empty());
    CHECK(rotated[0].model_id == base[0].model_id);
  }
}

TEST_CASE("watertight filter") {
  InvertedIndex idx;
  FakeCatalog cat;
  idx.insert(bag_of("open", {{1, 1}, {2, 1}}));
  idx.insert(bag_of("closed", {{1, 1}, {3, 1}}));
  cat.watertight = {{"open", false}, {"closed", true}};
  SearchQuery q;
  q.bag = bag_of("q", {{1, 1}, {2, 1}});
  q.filters.watertight = true;
  const auto r = query_similar(idx, &cat, q);
  REQUIRE(r.size() == 1);
  CHECK(r[0].model_id == "closed");
  q.filters = {};
  CHECK(query_similar(idx, &cat, q).size() == 2);
  q.filters.watertight = false;
  CHECK_THROWS_AS(query_similar(idx, nullptr, q), Error);
}

TEST_CASE("matched words explain the score") {
  InvertedIndex idx;
  idx.insert(bag_of("a", {{1, 2}, {2, 1}}));
  idx.insert(bag_of("b", {{3, 1}}));
  SearchQuery q;
  q.bag = bag_of("q", {{1, 1}, {3, 1}});
  const auto r = query_similar(idx, nullptr, q);
  REQUIRE(r.size() == 2);
  for (const SearchResult& res : r) {
    REQUIRE(res.matched.size() == 1);
    CHECK(res.matched[0].weight == doctest::Approx(std::log(1.0 + 2.0)));
  }
  CHECK(r[0].matched[0].word == (r[0].model_id == "a" ? 1u : 3u));
}

TEST_CASE("text search") {
  FakeCatalog cat;
  cat.texts = {{"g1", "Spur Gear 20T"}, {"g2", "bevel gear pair"}, {"x", "bracket"}, {"int1", "secret widget"}};
  const auto r = text_search(cat, "gear", 10);
  REQUIRE(r.size() == 2);
  CHECK(r[0].score > 0.0);
  CHECK(text_search(cat, "", 10).empty());
  CHECK(text_search(cat, "  !!  ", 10).empty());
  cat.gone.insert("int1");
  CHECK(text_search(cat, "widget", 10).empty());
  const auto two = text_search(cat, "spur gear", 10);
  REQUIRE(two.size() == 2);
  CHECK(two[0].model_id == "g1");
  CHECK(two[0].score == 1.0);
  CHECK(two[1].score == 0.5);
  CHECK(tokenize("Spur-Gear 20T") == std::vector<std::string>{"spur", "gear", "20t"});
}

TEST_CASE("brute force: empty corpus and k beyond corpus size") {
  CHECK(brute_force_topk({}, bag_of("q", {{1, 1}}), SearchMode::kSimilar, 5).empty());
  std::vector<WordBag> corpus{bag_of("a", {{1, 1}}), bag_of("b", {{1, 2}, {2, 1}}), bag_of("c", {{1, 1}, {3, 1}})};
  CHECK(brute_force_topk(corpus, bag_of("q", {{1, 1}}), SearchMode::kSimilar, 50).size() == 3);
  CHECK(brute_force_topk(corpus, bag_of("q", {{1, 1}}), SearchMode::kPip, 50).size() == 3);
}

TEST_CASE("index path equals the brute-force oracle on random corpora") {
  Rng rng(4);
  for (int corpus_trial = 0; corpus_trial < 4; ++corpus_trial) {
    std::vector<WordBag> corpus;
    InvertedIndex idx;
    const int n = 50 + static_cast<int>(rng.below(450));
    for (int i = 0; i < n; ++i) {
      corpus.push_back(random_bag(rng, "m" + std::to_string(i), 80, 10));
      idx.insert(corpus.back());
    }
    if (corpus_trial % 2 == 1) idx.mark_generic(0.1);
    for (int q = 0; q < 30; ++q) {
      SearchQuery query;
      query.bag = random_bag(rng, "q", 90, 6);
      query.k = 10;
      for (SearchMode mode : {SearchMode::kSimilar, SearchMode::kPip}) {
        query.mode = mode;
        std::vector<SearchResult> got, want;
        try {
          want = brute_force_topk(corpus, query.bag, mode, 10, idx.generic_words());
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::kQueryTooGeneric);
          CHECK_THROWS_AS(run_query(idx, FakeCatalog{}, query), Error);
          continue;
        }
        got = mode == SearchMode::kSimilar ? query_similar(idx, nullptr, query, Exec::kSerial)
                                           : query_pip(idx, nullptr, query, Exec::kSerial);
        check_same(got, want);
        const auto par = mode == SearchMode::kSimilar ? query_similar(idx, nullptr, query, Exec::kParallel)
                                                      : query_pip(idx, nullptr, query, Exec::kParallel);
        CHECK(par == got);
      }
    }
  }
}

TEST_CASE("ties break by id") {
  InvertedIndex idx;
  for (const char* id : {"c", "a", "b"}) idx.insert(bag_of(id, {{1, 1}}));
  SearchQuery q;
  q.bag = bag_of("q", {{1, 1}});
  const auto r = query_similar(idx, nullptr, q);
  REQUIRE(r.size() == 3);
  CHECK(r[0].model_id == "a");
  CHECK(r[1].model_id == "b");
  CHECK(r[2].model_id == "c");
}

TEST_CASE("invalid queries") {
  InvertedIndex idx;
  idx.insert(bag_of("a", {{1, 1}}));
  SearchQuery q;
  q.bag = bag_of("q", {{1, 1}});
  q.k = 0;
  CHECK_THROWS_AS(query_similar(idx, nullptr, q), Error);
  q.k = 1;
  q.bag = {};
  CHECK_THROWS_AS(query_similar(idx, nullptr, q), Error);
  CHECK(search_mode_from_string("pip") == SearchMode::kPip);
  CHECK_THROWS_AS(search_mode_from_string("fuzzy"), Error);
}

}  // TEST_SUITE
