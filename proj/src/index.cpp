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

#include "gw3d/index.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "gw3d/canonical_hash.hpp"
#include "gw3d/error.hpp"
#include "gw3d/mesh_io.hpp"
#include "gw3d/scoring.hpp"

namespace gw3d {

namespace {

enum SectionTag : std::uint32_t {
  kSectionConfig = 1,
  kSectionBags = 2,
  kSectionPostings = 3,
  kSectionGeneric = 4,
  kSectionSplits = 5,
};

constexpr std::size_t kChecksumBytes = 32;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  // Writes a section header and returns the offset of its length field.
  std::size_t begin_section(std::uint32_t tag) {
    u32(tag);
    const std::size_t at = out_.size();
    u64(0);
    return at;
  }
  void end_section(std::size_t length_at) {
    const std::uint64_t len = out_.size() - length_at - 8;
    for (int i = 0; i < 8; ++i) out_[length_at + i] = static_cast<std::uint8_t>(len >> (8 * i));
  }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { need(1); return in_[pos_++]; }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  ByteReader section(std::uint32_t expected_tag) {
    const std::uint32_t tag = u32();
    if (tag != expected_tag) {
      throw Error(ErrorCode::kCorrupt, "index section " + std::to_string(expected_tag) + " missing");
    }
    const std::uint64_t len = u64();
    need(len);
    ByteReader sub(in_.subspan(pos_, len));
    pos_ += len;
    return sub;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kCorrupt, "index section truncated");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

InvertedIndex::InvertedIndex(WordConfig config) : config_(std::move(config)) { config_.validate(); }

void InvertedIndex::insert(WordBag bag) {
  if (bag.empty()) throw Error(ErrorCode::kEmptyBag, "cannot index an empty bag");
  if (id_to_slot_.contains(bag.model_id)) {
    throw Error(ErrorCode::kAlreadyExists, "model '" + bag.model_id + "' already indexed");
  }
  for (const WordCount& wc : bag.words) {
    if (wc.count == 0) throw Error(ErrorCode::kInvalidArgument, "bag has a zero count");
  }
  ModelSlot slot;
  if (!free_slots_.empty()) {
    // Lowest free slot keeps posting appends mostly in order.
    auto it = std::min_element(free_slots_.begin(), free_slots_.end());
    slot = *it;
    free_slots_.erase(it);
  } else {
    slot = static_cast<ModelSlot>(slots_.size());
    slots_.emplace_back();
  }
  id_to_slot_.emplace(bag.model_id, slot);
  slots_[slot].id = bag.model_id;
  slots_[slot].bag = std::move(bag);
  slots_[slot].live = true;
  add_postings(slot);
  ++generation_;
}

void InvertedIndex::remove(std::string_view model_id) {
  auto it = id_to_slot_.find(std::string(model_id));
  if (it == id_to_slot_.end()) throw Error(ErrorCode::kNotFound, "model '" + std::string(model_id) + "' not indexed");
  const ModelSlot slot = it->second;
  drop_postings(slot);
  id_to_slot_.erase(it);
  slots_[slot] = Slot{};
  if (slot + 1 == slots_.size()) {
    slots_.pop_back();
    // Trailing free slots can go too.
    while (!slots_.empty() && !slots_.back().live) {
      const auto last = static_cast<ModelSlot>(slots_.size() - 1);
      free_slots_.erase(std::remove(free_slots_.begin(), free_slots_.end(), last), free_slots_.end());
      slots_.pop_back();
    }
  } else {
    free_slots_.push_back(slot);
  }
  ++generation_;
}

void InvertedIndex::add_postings(ModelSlot slot) {
  for (const WordCount& wc : slots_[slot].bag.words) {
    auto& list = postings_[wc.word];
    auto pos = std::lower_bound(list.begin(), list.end(), slot,
                                [](const kernels::Posting& p, ModelSlot s) { return p.slot < s; });
    list.insert(pos, kernels::Posting{slot, wc.count});
  }
}

void InvertedIndex::drop_postings(ModelSlot slot) {
  for (const WordCount& wc : slots_[slot].bag.words) {
    auto it = postings_.find(wc.word);
    if (it == postings_.end()) continue;
    auto& list = it->second;
    auto pos = std::lower_bound(list.begin(), list.end(), slot,
                                [](const kernels::Posting& p, ModelSlot s) { return p.slot < s; });
    if (pos != list.end() && pos->slot == slot) list.erase(pos);
    if (list.empty()) {
      postings_.erase(it);
      generic_.erase(wc.word);
    }
  }
}

bool InvertedIndex::contains(std::string_view model_id) const {
  return id_to_slot_.contains(std::string(model_id));
}

std::uint32_t InvertedIndex::df(WordId word) const {
  auto it = postings_.find(word);
  return it == postings_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

double InvertedIndex::weight(WordId word) const {
  if (generic_.contains(word)) return 0.0;
  return idf_weight(model_count(), df(word));
}

const WordBag* InvertedIndex::bag(std::string_view model_id) const {
  auto it = id_to_slot_.find(std::string(model_id));
  return it == id_to_slot_.end() ? nullptr : &slots_[it->second].bag;
}

std::vector<std::string> InvertedIndex::model_ids() const {
  std::vector<std::string> ids;
  ids.reserve(id_to_slot_.size());
  for (const auto& [id, slot] : id_to_slot_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::pair<std::string, std::uint32_t>> InvertedIndex::postings(WordId word) const {
  std::vector<std::pair<std::string, std::uint32_t>> out;
  auto it = postings_.find(word);
  if (it == postings_.end()) return out;
  for (const kernels::Posting& p : it->second) out.emplace_back(slots_[p.slot].id, p.count);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WordId> InvertedIndex::words() const {
  std::vector<WordId> out;
  out.reserve(postings_.size());
  for (const auto& [word, list] : postings_) out.push_back(word);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WordId> InvertedIndex::mark_generic(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "generic threshold must be in (0, 1]");
  }
  std::vector<WordId> marked;
  const auto n = static_cast<double>(model_count());
  if (n == 0) return marked;
  for (const auto& [word, list] : postings_) {
    if (static_cast<double>(list.size()) / n > threshold) marked.push_back(word);
  }
  std::sort(marked.begin(), marked.end());
  if (!marked.empty()) {
    generic_.insert(marked.begin(), marked.end());
    ++generation_;
  }
  return marked;
}

std::vector<WordId> InvertedIndex::split_generic_word(WordId word, const FeatureProvider& provider) {
  if (is_global(word)) throw Error(ErrorCode::kInvalidArgument, "global words cannot be split");
  auto pit = postings_.find(word);
  if (pit == postings_.end()) throw Error(ErrorCode::kNotFound, "word not indexed");
  if (word_level(word) + 1 > kMaxRefinementLevel) {
    throw Error(ErrorCode::kInvalidArgument, "word is already at the finest refinement level");
  }

  SplitRegistry refined = registry_;
  refined[word] = static_cast<std::uint8_t>(word_level(word) + 1);

  // Compute every rewritten bag before touching the index so a provider
  // failure leaves it unchanged.
  struct Rewrite {
    ModelSlot slot;
    std::vector<WordCount> synonyms;
  };
  std::vector<Rewrite> rewrites;
  for (const kernels::Posting& p : pit->second) {
    const std::string& id = slots_[p.slot].id;
    std::vector<WordId> ids;
    for (const LocalFeature& f : provider(id)) {
      for (const LocalFeature& g : soft_bin_features(f, config_)) {
        if (refine_word(g, config_, registry_) == word) ids.push_back(refine_word(g, config_, refined));
      }
    }
    auto synonyms = count_words(std::move(ids));
    std::uint64_t total = 0;
    for (const WordCount& wc : synonyms) total += wc.count;
    if (total != p.count) {
      throw Error(ErrorCode::kCorrupt, "re-derived features of '" + id + "' do not reproduce word counts");
    }
    rewrites.push_back({p.slot, std::move(synonyms)});
  }

  std::set<WordId> created;
  for (Rewrite& r : rewrites) {
    drop_postings(r.slot);
    WordBag& bag = slots_[r.slot].bag;
    bag.local_total -= bag.count(word);
    bag.words.erase(std::remove_if(bag.words.begin(), bag.words.end(),
                                   [&](const WordCount& wc) { return wc.word == word; }),
                    bag.words.end());
    for (const WordCount& wc : r.synonyms) {
      bag.add(wc.word, wc.count);
      created.insert(wc.word);
    }
    add_postings(r.slot);
  }
  postings_.erase(word);
  generic_.erase(word);
  registry_ = std::move(refined);
  ++generation_;
  return {created.begin(), created.end()};
}

std::vector<ModelSlot> InvertedIndex::candidate_slots_for(std::span<const WordId> words, Exec exec) const {
  std::vector<std::span<const kernels::Posting>> lists;
  lists.reserve(words.size());
  for (WordId w : words) {
    if (generic_.contains(w)) continue;
    auto it = postings_.find(w);
    if (it != postings_.end()) lists.emplace_back(it->second);
  }
  return exec == Exec::kParallel ? kernels::parallel::gather_candidates(lists)
                                 : kernels::serial::gather_candidates(lists);
}

std::vector<ModelSlot> InvertedIndex::candidate_slots(const WordBag& query, Exec exec, bool local_only) const {
  std::vector<WordId> words;
  words.reserve(query.words.size());
  for (const WordCount& wc : query.words) {
    if (!local_only || !is_global(wc.word)) words.push_back(wc.word);
  }
  return candidate_slots_for(words, exec);
}

std::vector<std::string> InvertedIndex::candidates(const WordBag& query, Exec exec) const {
  std::vector<std::string> out;
  for (ModelSlot s : candidate_slots(query, exec, false)) out.push_back(slots_[s].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint8_t> InvertedIndex::serialize() const {
  ByteWriter w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kFormatVersion);

  auto at = w.begin_section(kSectionConfig);
  w.str(config_.to_text());
  w.end_section(at);

  // Bags in model-id order; postings refer to models by that ordinal.
  const std::vector<std::string> ids = model_ids();
  std::unordered_map<ModelSlot, std::uint32_t> ordinal;
  at = w.begin_section(kSectionBags);
  w.u32(static_cast<std::uint32_t>(ids.size()));
  for (std::uint32_t i = 0; i < ids.size(); ++i) {
    const ModelSlot slot = id_to_slot_.at(ids[i]);
    ordinal[slot] = i;
    const WordBag& bag = slots_[slot].bag;
    w.str(bag.model_id);
    w.u32(bag.local_total);
    w.u8(static_cast<std::uint8_t>((bag.had_degenerates ? 1 : 0) | (bag.had_boundary ? 2 : 0)));
    w.u32(static_cast<std::uint32_t>(bag.words.size()));
    for (const WordCount& wc : bag.words) {
      w.u64(wc.word);
      w.u32(wc.count);
    }
  }
  w.end_section(at);

  at = w.begin_section(kSectionPostings);
  const std::vector<WordId> all_words = words();
  w.u32(static_cast<std::uint32_t>(all_words.size()));
  for (WordId word : all_words) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
    for (const kernels::Posting& p : postings_.at(word)) entries.emplace_back(ordinal.at(p.slot), p.count);
    std::sort(entries.begin(), entries.end());
    w.u64(word);
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (auto [ord, count] : entries) {
      w.u32(ord);
      w.u32(count);
    }
  }
  w.end_section(at);

  at = w.begin_section(kSectionGeneric);
  w.u32(static_cast<std::uint32_t>(generic_.size()));
  for (WordId g : generic_) w.u64(g);
  w.end_section(at);

  at = w.begin_section(kSectionSplits);
  w.u32(static_cast<std::uint32_t>(registry_.size()));
  for (auto [word, level] : registry_) {
    w.u64(word);
    w.u8(level);
  }
  w.end_section(at);

  const auto digest = sha256(w.data());
  w.bytes(digest.data(), digest.size());
  return std::move(w.data());
}

InvertedIndex InvertedIndex::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kBadMagic, "not a gw3d index file");
  }
  if (bytes.size() < sizeof(kMagic) + 4) throw Error(ErrorCode::kChecksum, "index file truncated");
  ByteReader header(bytes.subspan(sizeof(kMagic), 4));
  const std::uint32_t version = header.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "index format version " + std::to_string(version) +
                                                 " (supported: " + std::to_string(kFormatVersion) + ")");
  }
  if (bytes.size() < sizeof(kMagic) + 4 + kChecksumBytes) throw Error(ErrorCode::kChecksum, "index file truncated");
  const auto body = bytes.first(bytes.size() - kChecksumBytes);
  const auto digest = sha256(body);
  if (std::memcmp(digest.data(), bytes.data() + body.size(), kChecksumBytes) != 0) {
    throw Error(ErrorCode::kChecksum, "index checksum mismatch");
  }

  ByteReader r(body.subspan(sizeof(kMagic) + 4));
  ByteReader cfg = r.section(kSectionConfig);
  InvertedIndex index(WordConfig::from_text(cfg.str()));

  ByteReader bags = r.section(kSectionBags);
  const std::uint32_t model_count = bags.u32();
  std::vector<std::string> ordinal_to_id;
  for (std::uint32_t i = 0; i < model_count; ++i) {
    WordBag bag;
    bag.model_id = bags.str();
    bag.local_total = bags.u32();
    const std::uint8_t flags = bags.u8();
    bag.had_degenerates = (flags & 1) != 0;
    bag.had_boundary = (flags & 2) != 0;
    const std::uint32_t n = bags.u32();
    bag.words.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      const WordId word = bags.u64();
      const std::uint32_t count = bags.u32();
      if (!bag.words.empty() && bag.words.back().word >= word) throw Error(ErrorCode::kCorrupt, "bag words out of order");
      bag.words.push_back({word, count});
    }
    ordinal_to_id.push_back(bag.model_id);
    index.insert(std::move(bag));
  }

  // Stored postings must match those rebuilt from the bags.
  ByteReader posts = r.section(kSectionPostings);
  const std::uint32_t word_total = posts.u32();
  if (word_total != index.word_count()) throw Error(ErrorCode::kCorrupt, "posting word count mismatch");
  for (std::uint32_t i = 0; i < word_total; ++i) {
    const WordId word = posts.u64();
    const std::uint32_t n = posts.u32();
    std::vector<std::pair<std::string, std::uint32_t>> stored;
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t ord = posts.u32();
      const std::uint32_t count = posts.u32();
      if (ord >= ordinal_to_id.size()) throw Error(ErrorCode::kCorrupt, "posting references unknown model");
      stored.emplace_back(ordinal_to_id[ord], count);
    }
    std::sort(stored.begin(), stored.end());
    if (stored != index.postings(word)) throw Error(ErrorCode::kCorrupt, "postings disagree with bags");
  }

  ByteReader gen = r.section(kSectionGeneric);
  const std::uint32_t generic_count = gen.u32();
  for (std::uint32_t i = 0; i < generic_count; ++i) index.generic_.insert(gen.u64());

  ByteReader splits = r.section(kSectionSplits);
  const std::uint32_t split_count = splits.u32();
  for (std::uint32_t i = 0; i < split_count; ++i) {
    const WordId word = splits.u64();
    index.registry_[word] = splits.u8();
  }
  if (!r.done()) throw Error(ErrorCode::kCorrupt, "unexpected data after index sections");
  index.generation_ = 0;
  return index;
}

void InvertedIndex::save(const std::string& path) const {
  const auto bytes = serialize();
  const std::string tmp = path + ".tmp";
  write_file(tmp, bytes);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::kStorage, "cannot move index into place at '" + path + "'");
  }
}

InvertedIndex InvertedIndex::load(const std::string& path) { return deserialize(read_file(path)); }

InvertedIndex::AuditReport InvertedIndex::audit() const {
  AuditReport report;
  auto problem = [&](std::string what) {
    report.ok = false;
    report.problems.push_back(std::move(what));
  };

  std::size_t live = 0;
  std::map<WordId, std::vector<kernels::Posting>> rebuilt;
  for (ModelSlot s = 0; s < slots_.size(); ++s) {
    const Slot& slot = slots_[s];
    if (!slot.live) continue;
    ++live;
    auto it = id_to_slot_.find(slot.id);
    if (it == id_to_slot_.end() || it->second != s) problem("slot " + std::to_string(s) + " not in id map");
    if (slot.bag.model_id != slot.id) problem("bag id mismatch for '" + slot.id + "'");
    std::uint64_t local = 0;
    for (std::size_t i = 0; i < slot.bag.words.size(); ++i) {
      const WordCount& wc = slot.bag.words[i];
      if (wc.count == 0) problem("zero count in '" + slot.id + "'");
      if (i > 0 && slot.bag.words[i - 1].word >= wc.word) problem("unsorted bag '" + slot.id + "'");
      if (!is_global(wc.word)) local += wc.count;
      rebuilt[wc.word].push_back({s, wc.count});
    }
    if (local != slot.bag.local_total) problem("local total mismatch for '" + slot.id + "'");
  }
  if (live != id_to_slot_.size()) problem("N disagrees with forward store");
  if (rebuilt.size() != postings_.size()) problem("posting word count disagrees with forward store");
  for (const auto& [word, list] : rebuilt) {
    auto it = postings_.find(word);
    if (it == postings_.end() || it->second != list) problem("posting list mismatch");
  }
  for (WordId g : generic_) {
    if (!postings_.contains(g)) problem("generic word without postings");
  }
  return report;
}

std::string InvertedIndex::stats_text() const {
  std::map<std::size_t, std::size_t> df_hist;
  for (const auto& [word, list] : postings_) ++df_hist[list.size()];
  std::string out;
  out += "models " + std::to_string(model_count()) + "\n";
  out += "words " + std::to_string(word_count()) + "\n";
  out += "generic " + std::to_string(generic_.size()) + "\n";
  out += "split " + std::to_string(registry_.size()) + "\n";
  for (auto [df, n] : df_hist) out += "df " + std::to_string(df) + " " + std::to_string(n) + "\n";
  char buf[32];
  for (WordId g : generic_) {
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(g));
    out += "generic_word " + std::string(buf) + "\n";
  }
  return out;
}

bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
  if (!(a.config_ == b.config_) || a.generic_ != b.generic_ || a.registry_ != b.registry_ ||
      a.model_count() != b.model_count() || a.word_count() != b.word_count()) {
    return false;
  }
  for (const auto& [id, slot] : a.id_to_slot_) {
    const WordBag* other = b.bag(id);
    if (other == nullptr || !(*other == a.slots_[slot].bag)) return false;
  }
  for (const auto& [word, list] : a.postings_) {
    if (a.postings(word) != b.postings(word)) return false;
  }
  return true;
}

}  // namespace gw3d
