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

#include <omp.h>

#include <algorithm>
#include <exception>

#include "gw3d/kernels.hpp"

namespace gw3d::kernels::parallel {

namespace {

// Exceptions must not cross an OpenMP region boundary; the first one is
// parked here and rethrown after the loop.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(gw3d_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

std::vector<LocalFeature> local_features(const TriangleMesh& mesh, const MeshAdjacency& adjacency,
                                         std::span<const std::uint8_t> degenerate_mask) {
  const auto n = static_cast<std::int64_t>(mesh.triangles.size());
  std::vector<LocalFeature> all(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n; ++t) {
    if (degenerate_mask[t] == 0) {
      all[t] = facet_feature(mesh, adjacency, degenerate_mask, static_cast<std::uint32_t>(t));
    }
  }
  std::vector<LocalFeature> out;
  out.reserve(all.size());
  for (std::int64_t t = 0; t < n; ++t) {
    if (degenerate_mask[t] == 0) out.push_back(all[t]);
  }
  return out;
}

std::vector<WordCount> quantize(std::span<const LocalFeature> features, const WordConfig& config,
                                const SplitRegistry& registry) {
  const auto n = static_cast<std::int64_t>(features.size());
  std::vector<std::array<WordId, 2>> words(features.size());
  std::vector<std::uint8_t> emitted(features.size(), 0);
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    slot.run([&] {
      const auto w = quantize_local(features[i], config, registry);
      emitted[i] = static_cast<std::uint8_t>(w.size());
      for (std::size_t k = 0; k < w.size(); ++k) words[i][k] = w[k].id;
    });
  }
  slot.rethrow();
  std::vector<WordId> ids;
  ids.reserve(features.size());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::uint8_t k = 0; k < emitted[i]; ++k) ids.push_back(words[i][k]);
  }
  return count_words(std::move(ids));
}

std::vector<std::uint32_t> gather_candidates(std::span<const std::span<const Posting>> lists) {
  const auto n = static_cast<std::int64_t>(lists.size());
  std::vector<std::vector<std::uint32_t>> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
  {
    auto& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
      for (const Posting& p : lists[i]) mine.push_back(p.slot);
    }
  }
  std::vector<std::uint32_t> out;
  for (auto& part : partial) out.insert(out.end(), part.begin(), part.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> score_all(std::span<const std::uint32_t> items, const ScoreFn& score) {
  const auto n = static_cast<std::int64_t>(items.size());
  std::vector<double> out(items.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    slot.run([&] { out[i] = score(items[i]); });
  }
  slot.rethrow();
  return out;
}

void accumulate(Histogram& histogram, std::span<const double> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  std::vector<Histogram> partial(static_cast<std::size_t>(omp_get_max_threads()), histogram.empty_like());
#pragma omp parallel
  {
    Histogram& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) mine.add(values[i]);
  }
  for (const Histogram& part : partial) histogram.merge(part);
}

}  // namespace gw3d::kernels::parallel
