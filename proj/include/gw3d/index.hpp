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

#ifndef GW3D_INDEX_HPP_
#define GW3D_INDEX_HPP_

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gw3d/kernels.hpp"
#include "gw3d/words.hpp"

namespace gw3d {

using ModelSlot = std::uint32_t;

// Word -> posting list, model -> bag, with document frequencies, a generic
// word set and the registry of split words.
//
// Not internally synchronized: callers provide the many-readers/one-writer
// discipline (see Repository).
class InvertedIndex {
 public:
  static constexpr char kMagic[8] = {'G', 'W', '3', 'D', 'I', 'D', 'X', '\0'};
  static constexpr std::uint32_t kFormatVersion = 1;

  using FeatureProvider = std::function<std::vector<LocalFeature>(const std::string& model_id)>;

  explicit InvertedIndex(WordConfig config = {});

  const WordConfig& config() const { return config_; }

  // Throws kAlreadyExists for a present id, kEmptyBag for an empty bag.
  void insert(WordBag bag);
  // Throws kNotFound.
  void remove(std::string_view model_id);

  bool contains(std::string_view model_id) const;
  std::size_t model_count() const { return id_to_slot_.size(); }
  std::size_t word_count() const { return postings_.size(); }
  std::uint32_t df(WordId word) const;
  // 0 for generic words, ln(1 + N/df) otherwise.
  double weight(WordId word) const;
  const WordBag* bag(std::string_view model_id) const;
  std::vector<std::string> model_ids() const;
  // (model id, count), ascending by model id.
  std::vector<std::pair<std::string, std::uint32_t>> postings(WordId word) const;
  std::vector<WordId> words() const;

  const std::set<WordId>& generic_words() const { return generic_; }
  const SplitRegistry& split_registry() const { return registry_; }

  // Marks every word with df/N > threshold as generic; returns them.
  std::vector<WordId> mark_generic(double threshold = 0.25);

  // Replaces a local word by its refined synonyms, rewriting the affected
  // bags from features re-derived through `provider`. Returns the synonyms.
  std::vector<WordId> split_generic_word(WordId word, const FeatureProvider& provider);

  // Models sharing at least one positive-weight word with the query.
  std::vector<std::string> candidates(const WordBag& query, Exec exec = Exec::kParallel) const;
  std::vector<ModelSlot> candidate_slots(const WordBag& query, Exec exec, bool local_only) const;
  // Candidates restricted to the given query words.
  std::vector<ModelSlot> candidate_slots_for(std::span<const WordId> words, Exec exec) const;

  const std::string& slot_id(ModelSlot slot) const { return slots_[slot].id; }
  const WordBag& slot_bag(ModelSlot slot) const { return slots_[slot].bag; }

  // Bumped by every mutation.
  std::uint64_t generation() const { return generation_; }

  std::vector<std::uint8_t> serialize() const;
  static InvertedIndex deserialize(std::span<const std::uint8_t> bytes);
  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

  struct AuditReport {
    bool ok = true;
    std::vector<std::string> problems;
  };
  // Rebuilds postings from the forward store and compares.
  AuditReport audit() const;

  // Line-oriented summary: counts, df histogram, generic list.
  std::string stats_text() const;

  // Logical equality: same config, bags, postings, generic set, registry.
  friend bool operator==(const InvertedIndex& a, const InvertedIndex& b);

 private:
  struct Slot {
    std::string id;
    WordBag bag;
    bool live = false;
  };

  void add_postings(ModelSlot slot);
  void drop_postings(ModelSlot slot);

  WordConfig config_;
  std::vector<Slot> slots_;
  std::vector<ModelSlot> free_slots_;
  std::unordered_map<std::string, ModelSlot> id_to_slot_;
  std::unordered_map<WordId, std::vector<kernels::Posting>> postings_;  // ascending slot
  std::set<WordId> generic_;
  SplitRegistry registry_;
  std::uint64_t generation_ = 0;
};

}  // namespace gw3d

#endif  // GW3D_INDEX_HPP_
