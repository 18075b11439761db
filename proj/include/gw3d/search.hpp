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

#ifndef GW3D_SEARCH_HPP_
#define GW3D_SEARCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gw3d/index.hpp"
#include "gw3d/words.hpp"

namespace gw3d {

enum class SearchMode { kSimilar, kPip, kText };

std::string_view to_string(SearchMode mode);
SearchMode search_mode_from_string(std::string_view text);

enum class Provenance { kInternal, kExternal };

std::string_view to_string(Provenance provenance);
Provenance provenance_from_string(std::string_view text);

// Absent fields place no constraint.
struct Filters {
  std::optional<bool> watertight;
  std::optional<bool> consistent_normals;
  std::optional<std::string> filetype;  // "stl" matches both STL encodings
  std::optional<std::string> source_domain;

  bool empty() const { return !watertight && !consistent_normals && !filetype && !source_domain; }
};

struct SearchQuery {
  SearchMode mode = SearchMode::kSimilar;
  WordBag bag;
  std::string text;
  std::size_t k = 10;
  Filters filters;
};

struct MatchedWord {
  WordId word = 0;
  std::uint32_t query_count = 0;
  std::uint32_t target_count = 0;
  double weight = 0.0;

  friend bool operator==(const MatchedWord&, const MatchedWord&) = default;
};

struct SearchResult {
  std::string model_id;
  double score = 0.0;
  std::vector<MatchedWord> matched;
  Provenance provenance = Provenance::kExternal;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// What search needs from the catalog: filter checks, provenance, and the
// searchable text of every active model.
class CatalogView {
 public:
  virtual ~CatalogView() = default;
  // False for unknown or taken-down models.
  virtual bool accepts(const std::string& model_id, const Filters& filters) const = 0;
  virtual Provenance provenance(const std::string& model_id) const = 0;
  virtual void for_each_text(const std::function<void(const std::string& id, const std::string& text)>& fn) const = 0;
};

// Score descending, then model id ascending.
bool result_before(const SearchResult& a, const SearchResult& b);

std::vector<SearchResult> query_similar(const InvertedIndex& index, const CatalogView* catalog,
                                        const SearchQuery& query, Exec exec = Exec::kParallel);
std::vector<SearchResult> query_pip(const InvertedIndex& index, const CatalogView* catalog,
                                    const SearchQuery& query, Exec exec = Exec::kParallel);
// Dispatches on query.mode.
std::vector<SearchResult> run_query(const InvertedIndex& index, const CatalogView& catalog, const SearchQuery& query);

// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view text);

std::vector<SearchResult> text_search(const CatalogView& catalog, std::string_view query, std::size_t k,
                                      const Filters& filters = {});

// Exhaustive scoring over `corpus` with its own document-frequency table.
std::vector<SearchResult> brute_force_topk(const std::vector<WordBag>& corpus, const WordBag& query,
                                           SearchMode mode, std::size_t k,
                                           const std::set<WordId>& generic = {});

}  // namespace gw3d

#endif  // GW3D_SEARCH_HPP_
