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

#ifndef GW3D_CATALOG_HPP_
#define GW3D_CATALOG_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gw3d/canonical_hash.hpp"
#include "gw3d/index.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/mesh_io.hpp"
#include "gw3d/search.hpp"
#include "gw3d/words.hpp"

namespace gw3d {

inline constexpr std::string_view kConverterVersion = "1.0.0";
inline constexpr std::string_view kInternalUpload = "internal-upload";
inline constexpr std::int64_t kDay = 86400;

enum class LifecycleState { kActive, kTakenDown };

std::string_view to_string(LifecycleState state);
LifecycleState lifecycle_from_string(std::string_view text);

struct Source {
  std::string domain;
  std::string url;  // kInternalUpload for hosted uploads

  friend bool operator==(const Source&, const Source&) = default;
};

struct HistoryEntry {
  std::int64_t timestamp = 0;
  std::string action;
  std::string actor;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct VersionEntry {
  std::uint32_t version = 0;
  ContentHash hash;
  std::int64_t timestamp = 0;
  std::string note;

  friend bool operator==(const VersionEntry&, const VersionEntry&) = default;
};

struct VersionChain {
  std::string model_id;
  std::vector<VersionEntry> versions;

  friend bool operator==(const VersionChain&, const VersionChain&) = default;
};

struct ModelRecord {
  std::string id;
  std::string name;
  std::string description;
  std::vector<std::string> tags;
  std::vector<Source> sources;
  MeshFormat original_format = MeshFormat::kOther;
  std::string format_label;  // set for kOther, e.g. "step"
  std::string converter_version;
  std::vector<HistoryEntry> history;
  ContentHash hash;
  std::string bag_id;
  MeshStats stats;
  LifecycleState state = LifecycleState::kActive;
  Provenance provenance = Provenance::kExternal;
  VersionChain chain;

  std::string filetype() const;

  friend bool operator==(const ModelRecord&, const ModelRecord&) = default;
};

struct FreshnessRecord {
  std::string domain;
  std::int64_t last_ingest = 0;
  std::int64_t interval = 7 * kDay;

  std::int64_t staleness(std::int64_t now) const { return now - last_ingest; }

  friend bool operator==(const FreshnessRecord&, const FreshnessRecord&) = default;
};

enum class MatchKind { kExact, kGeometric };

std::string_view to_string(MatchKind kind);

struct DuplicateMatch {
  std::string model_id;
  MatchKind kind = MatchKind::kExact;
  double similarity = 1.0;

  friend bool operator==(const DuplicateMatch&, const DuplicateMatch&) = default;
};

struct IngestRequest {
  std::vector<std::uint8_t> bytes;
  std::string format_hint;  // "stl", "obj" or empty
  std::string name;
  std::string description;
  std::vector<std::string> tags;
  Source source;
  std::string original_label;  // non-empty when converted from another format
  std::string actor = "ingest";
  std::optional<std::int64_t> timestamp;
};

struct IngestResult {
  ModelRecord record;
  bool created = false;
  std::optional<DuplicateMatch> merged_with;
};

struct CatalogConfig {
  WordConfig words;
  double duplicate_threshold = 0.995;
  bool merge_geometric = true;
  std::int64_t default_recrawl_interval = 7 * kDay;
  std::map<std::string, std::int64_t> recrawl_intervals;
  std::function<std::int64_t()> clock;  // seconds; system clock when empty
};

enum class IngestStage { kParsed, kBagBuilt, kDeduped, kBlobStored, kIndexed, kRecorded };

std::string_view to_string(IngestStage stage);

// Model lifecycle over an owned index: ingest, dedup, versions, takedown,
// freshness, and a directory-backed store. Not internally synchronized.
class Catalog : public CatalogView {
 public:
  explicit Catalog(CatalogConfig config = {});

  // Opens (or initialises) a store directory; later mutations persist there.
  static Catalog open(const std::string& dir, CatalogConfig config = {});
  const std::string& store_dir() const { return store_dir_; }

  // Atomic: any failure leaves catalog and index unchanged.
  IngestResult ingest(const IngestRequest& request);

  // Exact hash matches first, then geometric near-duplicates by similarity.
  std::vector<DuplicateMatch> find_duplicates(const ContentHash& hash, const WordBag& bag) const;

  const VersionChain& record_version(const std::string& model_id, std::span<const std::uint8_t> bytes,
                                     const std::string& note = {}, std::optional<std::int64_t> timestamp = {});

  void take_down(const std::string& model_id, const std::string& actor = "takedown",
                 std::optional<std::int64_t> timestamp = {});

  // Stale domains, most stale first.
  std::vector<std::string> due_for_recrawl(std::int64_t now) const;

  const ModelRecord* find(const std::string& model_id) const;
  // Throws kNotFound.
  const ModelRecord& record(const std::string& model_id) const;
  std::vector<std::string> record_ids() const;
  std::size_t active_count() const;
  const std::map<std::string, FreshnessRecord>& freshness() const { return freshness_; }

  const InvertedIndex& index() const { return index_; }
  const WordConfig& word_config() const { return config_.words; }
  const CatalogConfig& config() const { return config_; }

  // Builds a query bag with the index's split registry applied.
  WordBag query_bag(std::span<const std::uint8_t> bytes, const std::string& format_hint = {}) const;

  std::vector<WordId> mark_generic(double threshold = 0.25);
  std::vector<WordId> split_generic_word(WordId word);
  InvertedIndex::FeatureProvider feature_provider() const;

  // Current-version mesh bytes; kGone once deleted by a takedown.
  std::vector<std::uint8_t> blob(const ContentHash& hash) const;
  bool has_blob(const ContentHash& hash) const;

  struct AuditReport {
    bool ok = true;
    std::vector<std::string> problems;
  };
  // Referential integrity between records and index, plus the index audit.
  AuditReport audit() const;

  // Header line then one JSON object per line.
  std::string export_jsonl() const;
  static constexpr int kExportVersion = 1;

  // Writes catalog and index snapshots into the store directory.
  void flush() const;

  // Called after each ingest stage; a throwing hook simulates a failure there.
  // Persist after every committed mutation (on by default when a store is
  // open); with it off, call flush() explicitly.
  void set_autoflush(bool on) { autoflush_ = on; }

  void set_fault_hook(std::function<void(IngestStage)> hook) { fault_hook_ = std::move(hook); }

  std::uint64_t generation() const { return generation_; }

  bool accepts(const std::string& model_id, const Filters& filters) const override;
  Provenance provenance(const std::string& model_id) const override;
  void for_each_text(const std::function<void(const std::string&, const std::string&)>& fn) const override;

 private:
  std::int64_t now() const;
  std::string next_model_id(const ContentHash& hash);
  void touch_freshness(const Source& source, std::int64_t when);
  void store_blob(const ContentHash& hash, std::span<const std::uint8_t> bytes);
  void delete_blob(const ContentHash& hash);
  std::string blob_path(const ContentHash& hash) const;
  void persist();
  void load_snapshot();
  void stage(IngestStage s) const;

  CatalogConfig config_;
  InvertedIndex index_;
  std::map<std::string, ModelRecord> records_;
  std::map<ContentHash, std::string> active_by_hash_;
  std::map<std::string, FreshnessRecord> freshness_;
  std::map<std::string, std::vector<std::uint8_t>> memory_blobs_;  // used without a store dir
  std::uint64_t sequence_ = 0;
  std::uint64_t generation_ = 0;
  std::string store_dir_;
  std::function<void(IngestStage)> fault_hook_;
  bool autoflush_ = true;
};

}  // namespace gw3d

#endif  // GW3D_CATALOG_HPP_
