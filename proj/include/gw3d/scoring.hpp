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

#ifndef GW3D_SCORING_HPP_
#define GW3D_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include "gw3d/error.hpp"
#include "gw3d/words.hpp"

namespace gw3d {

// ln(1 + N/df); a word unseen in the corpus weighs as if df were 1.
inline double idf_weight(std::size_t model_count, std::size_t df) {
  return std::log(1.0 + static_cast<double>(model_count) / static_cast<double>(std::max<std::size_t>(df, 1)));
}

// Explicit word -> weight table; words not listed get `fallback`.
struct WeightTable {
  std::unordered_map<WordId, double> weights;
  double fallback = 1.0;

  double operator()(WordId word) const {
    auto it = weights.find(word);
    return it == weights.end() ? fallback : it->second;
  }
};

template <typename WeightFn>
double weighted_norm(const WordBag& bag, const WeightFn& weight) {
  double sum = 0.0;
  for (const WordCount& wc : bag.words) {
    const double v = wc.count * weight(wc.word);
    sum += v * v;
  }
  return sum;  // squared
}

// Cosine of the IDF-weighted count vectors; 0 when either vector is zero.
// `target_norm2` may be supplied precomputed (squared weighted norm).
template <typename WeightFn>
double score_similarity(const WordBag& query, const WordBag& target, const WeightFn& weight,
                        double query_norm2, double target_norm2) {
  if (query_norm2 <= 0.0 || target_norm2 <= 0.0) return 0.0;
  double dot = 0.0;
  auto q = query.words.begin();
  auto t = target.words.begin();
  while (q != query.words.end() && t != target.words.end()) {
    if (q->word < t->word) {
      ++q;
    } else if (t->word < q->word) {
      ++t;
    } else {
      const double w = weight(q->word);
      dot += (q->count * w) * (t->count * w);
      ++q;
      ++t;
    }
  }
  return std::clamp(dot / std::sqrt(query_norm2 * target_norm2), 0.0, 1.0);
}

template <typename WeightFn>
double score_similarity(const WordBag& query, const WordBag& target, const WeightFn& weight) {
  return score_similarity(query, target, weight, weighted_norm(query, weight), weighted_norm(target, weight));
}

// Weighted mass of the query's local words.
template <typename WeightFn>
double containment_denominator(const WordBag& query, const WeightFn& weight) {
  double den = 0.0;
  for (const WordCount& wc : query.words) {
    if (!is_global(wc.word)) den += weight(wc.word) * wc.count;
  }
  return den;
}

// sum w*min(q,t) / sum w*q over local words; 1 exactly when the weighted
// query is a sub-multiset of the target.
template <typename WeightFn>
double score_containment(const WordBag& query, const WordBag& target, const WeightFn& weight,
                         double denominator) {
  if (!(denominator > 0.0)) throw Error(ErrorCode::kQueryTooGeneric, "query too generic");
  double num = 0.0;
  auto t = target.words.begin();
  for (const WordCount& qc : query.words) {
    if (is_global(qc.word)) continue;
    while (t != target.words.end() && t->word < qc.word) ++t;
    const std::uint32_t tc = (t != target.words.end() && t->word == qc.word) ? t->count : 0;
    num += weight(qc.word) * std::min(qc.count, tc);
  }
  return std::clamp(num / denominator, 0.0, 1.0);
}

template <typename WeightFn>
double score_containment(const WordBag& query, const WordBag& target, const WeightFn& weight) {
  return score_containment(query, target, weight, containment_denominator(query, weight));
}

}  // namespace gw3d

#endif  // GW3D_SCORING_HPP_
