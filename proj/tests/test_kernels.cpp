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
#include <omp.h>

#include <set>

#include "gw3d/analysis.hpp"
#include "gw3d/generators.hpp"
#include "gw3d/kernels.hpp"
#include "support.hpp"

using namespace gw3d;

namespace {

// Runs fn under several thread counts and returns each result.
template <typename Fn>
auto under_thread_counts(Fn&& fn) {
  const int saved = omp_get_max_threads();
  std::vector<decltype(fn())> out;
  for (int threads : {1, 2, 3, 7}) {
    omp_set_num_threads(threads);
    out.push_back(fn());
  }
  omp_set_num_threads(saved);
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("local_features: parallel equals serial for any thread count") {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const TriangleMesh m = make_icosphere(3, 1.0, &rng, 0.2);
    const MeshAdjacency adj(m);
    std::vector<std::uint8_t> mask(m.triangles.size(), 0);
    for (std::size_t i = 0; i < mask.size(); i += 17) mask[i] = 1;
    const auto ref = kernels::serial::local_features(m, adj, mask);
    for (const auto& got : under_thread_counts([&] { return kernels::parallel::local_features(m, adj, mask); })) {
      CHECK(got == ref);
    }
  }
}

TEST_CASE("quantize: parallel equals serial") {
  Rng rng(2);
  const TriangleMesh m = make_icosphere(4, 1.0, &rng, 0.2);
  const MeshAdjacency adj(m);
  const std::vector<std::uint8_t> mask(m.triangles.size(), 0);
  const auto features = kernels::serial::local_features(m, adj, mask);
  for (double margin : {0.0, 0.2}) {
    WordConfig cfg;
    cfg.soft_margin = margin;
    const auto ref = kernels::serial::quantize(features, cfg, {});
    for (const auto& got : under_thread_counts([&] { return kernels::parallel::quantize(features, cfg, {}); })) {
      CHECK(got == ref);
    }
  }
}

TEST_CASE("gather_candidates: sorted union, identical across schedules") {
  Rng rng(3);
  std::vector<std::vector<kernels::Posting>> lists(40);
  for (auto& l : lists) {
    std::uint32_t slot = 0;
    const auto n = rng.below(200);
    for (std::uint64_t i = 0; i < n; ++i) {
      slot += 1 + static_cast<std::uint32_t>(rng.below(20));
      l.push_back({slot, 1});
    }
  }
  std::vector<std::span<const kernels::Posting>> spans(lists.begin(), lists.end());
  const auto ref = kernels::serial::gather_candidates(spans);
  CHECK(std::is_sorted(ref.begin(), ref.end()));
  CHECK(std::adjacent_find(ref.begin(), ref.end()) == ref.end());
  std::set<std::uint32_t> expect;
  for (const auto& l : lists) {
    for (const auto& p : l) expect.insert(p.slot);
  }
  CHECK(std::vector<std::uint32_t>(expect.begin(), expect.end()) == ref);
  for (const auto& got : under_thread_counts([&] { return kernels::parallel::gather_candidates(spans); })) {
    CHECK(got == ref);
  }
  CHECK(kernels::parallel::gather_candidates({}).empty());
}

TEST_CASE("score_all: parallel equals serial") {
  std::vector<std::uint32_t> items(5000);
  std::iota(items.begin(), items.end(), 0u);
  const kernels::ScoreFn fn = [](std::uint32_t i) { return std::sin(i * 0.37) + i * 1e-3; };
  const auto ref = kernels::serial::score_all(items, fn);
  for (const auto& got : under_thread_counts([&] { return kernels::parallel::score_all(items, fn); })) {
    CHECK(got == ref);
  }
}

TEST_CASE("accumulate: parallel equals serial, including outside values") {
  Rng rng(4);
  std::vector<double> values(100000);
  for (double& v : values) v = rng.gamma(2.0, 0.5);
  values.push_back(-1.0);
  values.push_back(1e9);
  values.push_back(std::nan(""));
  Histogram ref = Histogram::log_width(1e-3, 1e2, 50);
  kernels::serial::accumulate(ref, values);
  CHECK(ref.n == values.size());
  for (const auto& got : under_thread_counts([&] {
         Histogram h = Histogram::log_width(1e-3, 1e2, 50);
         kernels::parallel::accumulate(h, values);
         return h;
       })) {
    CHECK(got == ref);
  }
}

}  // TEST_SUITE
