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

#include <benchmark/benchmark.h>

#include <vector>

#include "gw3d/analysis.hpp"
#include "gw3d/generators.hpp"
#include "gw3d/index.hpp"
#include "gw3d/kernels.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/search.hpp"
#include "gw3d/words.hpp"

namespace {

using namespace gw3d;

struct Fixture {
  TriangleMesh mesh;
  MeshAdjacency adjacency;
  std::vector<std::uint8_t> mask;
  std::vector<LocalFeature> features;
  WordConfig config;

  explicit Fixture(int subdivisions) {
    Rng rng(7);
    mesh = make_icosphere(subdivisions, 1.0, &rng, 0.1);
    adjacency = MeshAdjacency(mesh);
    mask.assign(mesh.triangles.size(), 0);
    features = kernels::serial::local_features(mesh, adjacency, mask);
  }
};

const Fixture& fixture() {
  static const Fixture f(5);
  return f;
}

template <bool Parallel>
void BM_LocalFeatures(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto out = Parallel ? kernels::parallel::local_features(f.mesh, f.adjacency, f.mask)
                        : kernels::serial::local_features(f.mesh, f.adjacency, f.mask);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.mesh.triangles.size()));
}
BENCHMARK(BM_LocalFeatures<false>)->Name("local_features/serial");
BENCHMARK(BM_LocalFeatures<true>)->Name("local_features/parallel");

template <bool Parallel>
void BM_Quantize(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto out = Parallel ? kernels::parallel::quantize(f.features, f.config, {})
                        : kernels::serial::quantize(f.features, f.config, {});
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.features.size()));
}
BENCHMARK(BM_Quantize<false>)->Name("quantize/serial");
BENCHMARK(BM_Quantize<true>)->Name("quantize/parallel");

template <bool Parallel>
void BM_Accumulate(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> values(1 << 20);
  for (double& v : values) v = rng.gamma(2.0, 0.5);
  const Histogram empty = Histogram::log_width(1e-3, 1e3, 60);
  for (auto _ : state) {
    Histogram h = empty;
    if (Parallel) {
      kernels::parallel::accumulate(h, values);
    } else {
      kernels::serial::accumulate(h, values);
    }
    benchmark::DoNotOptimize(h);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(values.size()));
}
BENCHMARK(BM_Accumulate<false>)->Name("accumulate/serial");
BENCHMARK(BM_Accumulate<true>)->Name("accumulate/parallel");

const InvertedIndex& corpus_index() {
  static const InvertedIndex index = [] {
    InvertedIndex idx;
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
      WordBag bag = build_bag(make_random_convex(rng, 16 + static_cast<int>(rng.below(48)), 1.0), idx.config());
      bag.model_id = "m" + std::to_string(i);
      idx.insert(std::move(bag));
    }
    return idx;
  }();
  return index;
}

template <bool Parallel>
void BM_QuerySimilar(benchmark::State& state) {
  const InvertedIndex& idx = corpus_index();
  Rng rng(12);
  SearchQuery q;
  q.bag = build_bag(make_random_convex(rng, 32, 1.0), idx.config());
  for (auto _ : state) {
    auto out = query_similar(idx, nullptr, q, Parallel ? Exec::kParallel : Exec::kSerial);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_QuerySimilar<false>)->Name("query_similar/serial");
BENCHMARK(BM_QuerySimilar<true>)->Name("query_similar/parallel");

}  // namespace

BENCHMARK_MAIN();
