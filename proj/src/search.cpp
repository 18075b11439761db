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

#include "gw3d/search.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "gw3d/error.hpp"
#include "gw3d/kernels.hpp"
#include "gw3d/scoring.hpp"

namespace gw3d {

std::string_view to_string(SearchMode mode) {
  switch (mode) {
    case SearchMode::kSimilar: return "similar";
    case SearchMode::kPip: return "pip";
    case SearchMode::kText: return "text";
  }
  return "?";
}

SearchMode search_mode_from_string(std::string_view text) {
  if (text == "similar") return SearchMode::kSimilar;
  if (text == "pip") return SearchMode::kPip;
  if (text == "text") return SearchMode::kText;
  throw Error(ErrorCode::kInvalidArgument, "unknown search mode '" + std::string(text) + "'");
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::kInternal ? "internal" : "external";
}

Provenance provenance_from_string(std::string_view text) {
  if (text == "internal") return Provenance::kInternal;
  if (text == "external") return Provenance::kExternal;
  throw Error(ErrorCode::kInvalidArgument, "unknown provenance '" + std::string(text) + "'");
}

bool result_before(const SearchResult& a, const SearchResult& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.model_id < b.model_id;
}

namespace {

template <typename WeightFn>
std::vector<MatchedWord> matched_words(const WordBag& query, const WordBag& target, const WeightFn& weight,
                                       bool local_only) {
  std::vector<MatchedWord> out;
  auto t = target.words.begin();
  for (const WordCount& q : query.words) {
    if (local_only && is_global(q.word)) continue;
    while (t != target.words.end() && t->word < q.word) ++t;
    if (t == target.words.end()) break;
    if (t->word == q.word) out.push_back({q.word, q.count, t->count, weight(q.word)});
  }
  return out;
}

struct Scored {
  double score;
  std::uint32_t item;
};

// Keeps positive scores, sorts, truncates to k.
template <typename IdOf>
std::vector<Scored> top_k(const std::vector<std::uint32_t>& items, const std::vector<double>& scores,
                          std::size_t k, const IdOf& id_of) {
  std::vector<Scored> kept;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (scores[i] > 0.0) kept.push_back({scores[i], items[i]});
  }
  auto before = [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return id_of(a.item) < id_of(b.item);
  };
  if (kept.size() > k) {
    std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(k), kept.end(), before);
    kept.resize(k);
  } else {
    std::sort(kept.begin(), kept.end(), before);
  }
  return kept;
}

void check_geometric_query(const SearchQuery& query, const CatalogView* catalog) {
  if (query.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (query.bag.empty()) throw Error(ErrorCode::kEmptyBag, "query bag is empty");
  if (catalog == nullptr && !query.filters.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "filters need catalog metadata");
  }
}

std::vector<SearchResult> index_query(const InvertedIndex& index, const CatalogView* catalog,
                                      const SearchQuery& query, Exec exec, bool pip) {
  check_geometric_query(query, catalog);
  auto weight = [&index](WordId w) { return index.weight(w); };
  const double query_norm2 = pip ? 0.0 : weighted_norm(query.bag, weight);
  const double denominator = pip ? containment_denominator(query.bag, weight) : 0.0;
  if (pip && !(denominator > 0.0)) throw Error(ErrorCode::kQueryTooGeneric, "query too generic");

  std::vector<ModelSlot> slots = index.candidate_slots(query.bag, exec, pip);
  if (catalog != nullptr && !query.filters.empty()) {
    std::erase_if(slots, [&](ModelSlot s) { return !catalog->accepts(index.slot_id(s), query.filters); });
  }

  kernels::ScoreFn score;
  if (pip) {
    score = [&](std::uint32_t s) { return score_containment(query.bag, index.slot_bag(s), weight, denominator); };
  } else {
    score = [&](std::uint32_t s) {
      const WordBag& target = index.slot_bag(s);
      return score_similarity(query.bag, target, weight, query_norm2, weighted_norm(target, weight));
    };
  }
  const std::vector<double> scores = exec == Exec::kParallel ? kernels::parallel::score_all(slots, score)
                                                             : kernels::serial::score_all(slots, score);

  std::vector<SearchResult> results;
  for (const Scored& s : top_k(slots, scores, query.k, [&](std::uint32_t slot) -> const std::string& {
         return index.slot_id(slot);
       })) {
    SearchResult r;
    r.model_id = index.slot_id(s.item);
    r.score = s.score;
    r.matched = matched_words(query.bag, index.slot_bag(s.item), weight, pip);
    r.provenance = catalog != nullptr ? catalog->provenance(r.model_id) : Provenance::kExternal;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace

std::vector<SearchResult> query_similar(const InvertedIndex& index, const CatalogView* catalog,
                                        const SearchQuery& query, Exec exec) {
  return index_query(index, catalog, query, exec, false);
}

std::vector<SearchResult> query_pip(const InvertedIndex& index, const CatalogView* catalog,
                                    const SearchQuery& query, Exec exec) {
  return index_query(index, catalog, query, exec, true);
}

std::vector<SearchResult> run_query(const InvertedIndex& index, const CatalogView& catalog, const SearchQuery& query) {
  switch (query.mode) {
    case SearchMode::kSimilar: return query_similar(index, &catalog, query);
    case SearchMode::kPip: return query_pip(index, &catalog, query);
    case SearchMode::kText: return text_search(catalog, query.text, query.k, query.filters);
  }
  return {};
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) != 0) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<SearchResult> text_search(const CatalogView& catalog, std::string_view query, std::size_t k,
                                      const Filters& filters) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::vector<std::string> wanted = tokenize(query);
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  std::vector<SearchResult> results;
  if (wanted.empty()) return results;

  catalog.for_each_text([&](const std::string& id, const std::string& text) {
    std::vector<std::string> have = tokenize(text);
    std::sort(have.begin(), have.end());
    std::size_t hits = 0;
    for (const std::string& w : wanted) {
      if (std::binary_search(have.begin(), have.end(), w)) ++hits;
    }
    if (hits == 0 || !catalog.accepts(id, filters)) return;
    SearchResult r;
    r.model_id = id;
    r.score = static_cast<double>(hits) / static_cast<double>(wanted.size());
    r.provenance = catalog.provenance(id);
    results.push_back(std::move(r));
  });
  std::sort(results.begin(), results.end(), result_before);
  if (results.size() > k) results.resize(k);
  return results;
}

std::vector<SearchResult> brute_force_topk(const std::vector<WordBag>& corpus, const WordBag& query,
                                           SearchMode mode, std::size_t k, const std::set<WordId>& generic) {
  if (mode == SearchMode::kText) throw Error(ErrorCode::kInvalidArgument, "brute force covers geometric modes");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (corpus.empty()) return {};
  if (query.empty()) throw Error(ErrorCode::kEmptyBag, "query bag is empty");

  std::unordered_map<WordId, std::size_t> df;
  for (const WordBag& bag : corpus) {
    for (const WordCount& wc : bag.words) ++df[wc.word];
  }
  auto weight = [&](WordId w) {
    if (generic.contains(w)) return 0.0;
    auto it = df.find(w);
    return idf_weight(corpus.size(), it == df.end() ? 0 : it->second);
  };

  const bool pip = mode == SearchMode::kPip;
  const double denominator = pip ? containment_denominator(query, weight) : 0.0;
  if (pip && !(denominator > 0.0)) throw Error(ErrorCode::kQueryTooGeneric, "query too generic");
  const double query_norm2 = weighted_norm(query, weight);

  std::vector<std::uint32_t> items(corpus.size());
  std::vector<double> scores(corpus.size());
  for (std::uint32_t i = 0; i < corpus.size(); ++i) {
    items[i] = i;
    scores[i] = pip ? score_containment(query, corpus[i], weight, denominator)
                    : score_similarity(query, corpus[i], weight, query_norm2, weighted_norm(corpus[i], weight));
  }
  std::vector<SearchResult> results;
  for (const Scored& s : top_k(items, scores, k, [&](std::uint32_t i) -> const std::string& {
         return corpus[i].model_id;
       })) {
    SearchResult r;
    r.model_id = corpus[s.item].model_id;
    r.score = s.score;
    r.matched = matched_words(query, corpus[s.item], weight, pip);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace gw3d
