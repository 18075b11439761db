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

#include "gw3d/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "gw3d/error.hpp"
#include "gw3d/json_codec.hpp"
#include "gw3d/scoring.hpp"

namespace gw3d {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCatalogFile = "catalog.jsonl";
constexpr const char* kIndexFile = "index.gw3d";
constexpr const char* kBlobDir = "blobs";
constexpr std::string_view kExportFormat = "gw3d-catalog";

std::string hint_for(MeshFormat format) {
  switch (format) {
    case MeshFormat::kStlBinary:
    case MeshFormat::kStlAscii: return "stl";
    case MeshFormat::kObj: return "obj";
    case MeshFormat::kOther: return "";
  }
  return "";
}

void rename_into_place(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::rename(from, to, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot move '" + from.string() + "' into place: " + ec.message());
}

}  // namespace

std::string_view to_string(LifecycleState state) {
  return state == LifecycleState::kActive ? "active" : "taken_down";
}

LifecycleState lifecycle_from_string(std::string_view text) {
  if (text == "active") return LifecycleState::kActive;
  if (text == "taken_down") return LifecycleState::kTakenDown;
  throw Error(ErrorCode::kInvalidArgument, "unknown lifecycle state '" + std::string(text) + "'");
}

std::string_view to_string(MatchKind kind) { return kind == MatchKind::kExact ? "exact" : "geometric"; }

std::string_view to_string(IngestStage stage) {
  switch (stage) {
    case IngestStage::kParsed: return "parsed";
    case IngestStage::kBagBuilt: return "bag_built";
    case IngestStage::kDeduped: return "deduped";
    case IngestStage::kBlobStored: return "blob_stored";
    case IngestStage::kIndexed: return "indexed";
    case IngestStage::kRecorded: return "recorded";
  }
  return "?";
}

std::string ModelRecord::filetype() const {
  if (original_format == MeshFormat::kOther && !format_label.empty()) return format_label;
  return std::string(to_string(original_format));
}

Catalog::Catalog(CatalogConfig config) : config_(std::move(config)), index_(config_.words) {
  if (!(config_.duplicate_threshold > 0.0 && config_.duplicate_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate threshold must be in (0, 1]");
  }
  if (config_.default_recrawl_interval <= 0) throw Error(ErrorCode::kInvalidArgument, "recrawl interval must be positive");
  for (const auto& [domain, interval] : config_.recrawl_intervals) {
    if (interval <= 0) throw Error(ErrorCode::kInvalidArgument, "recrawl interval for '" + domain + "' must be positive");
  }
}

Catalog Catalog::open(const std::string& dir, CatalogConfig config) {
  Catalog c(std::move(config));
  c.store_dir_ = dir;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / kBlobDir, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot create store at '" + dir + "': " + ec.message());
  if (fs::exists(fs::path(dir) / kCatalogFile)) c.load_snapshot();
  return c;
}

std::int64_t Catalog::now() const {
  if (config_.clock) return config_.clock();
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

void Catalog::stage(IngestStage s) const {
  if (fault_hook_) fault_hook_(s);
}

std::string Catalog::next_model_id(const ContentHash& hash) {
  for (;;) {
    std::vector<std::uint8_t> seed(hash.digest.begin(), hash.digest.end());
    for (int i = 0; i < 8; ++i) seed.push_back(static_cast<std::uint8_t>(sequence_ >> (8 * i)));
    ++sequence_;
    const auto digest = sha256(seed);
    std::string id = "m";
    char buf[3];
    for (int i = 0; i < 6; ++i) {
      std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
      id += buf;
    }
    if (!records_.contains(id)) return id;
  }
}

void Catalog::touch_freshness(const Source& source, std::int64_t when) {
  if (source.url == kInternalUpload || source.domain.empty()) return;
  FreshnessRecord& f = freshness_[source.domain];
  f.domain = source.domain;
  f.last_ingest = std::max(f.last_ingest, when);
  auto it = config_.recrawl_intervals.find(source.domain);
  f.interval = it != config_.recrawl_intervals.end() ? it->second : config_.default_recrawl_interval;
}

std::string Catalog::blob_path(const ContentHash& hash) const {
  return (fs::path(store_dir_) / kBlobDir / (hash.hex() + ".bin")).string();
}

bool Catalog::has_blob(const ContentHash& hash) const {
  if (store_dir_.empty()) return memory_blobs_.contains(hash.hex());
  return fs::exists(blob_path(hash));
}

void Catalog::store_blob(const ContentHash& hash, std::span<const std::uint8_t> bytes) {
  if (has_blob(hash)) return;
  if (store_dir_.empty()) {
    memory_blobs_.emplace(hash.hex(), std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
    return;
  }
  const std::string path = blob_path(hash);
  write_file(path + ".tmp", bytes);
  rename_into_place(path + ".tmp", path);
}

void Catalog::delete_blob(const ContentHash& hash) {
  if (store_dir_.empty()) {
    memory_blobs_.erase(hash.hex());
    return;
  }
  std::error_code ec;
  fs::remove(blob_path(hash), ec);
}

std::vector<std::uint8_t> Catalog::blob(const ContentHash& hash) const {
  if (store_dir_.empty()) {
    auto it = memory_blobs_.find(hash.hex());
    if (it == memory_blobs_.end()) throw Error(ErrorCode::kGone, "model bytes are no longer stored");
    return it->second;
  }
  if (!fs::exists(blob_path(hash))) throw Error(ErrorCode::kGone, "model bytes are no longer stored");
  return read_file(blob_path(hash));
}

IngestResult Catalog::ingest(const IngestRequest& request) {
  const std::int64_t ts = request.timestamp.value_or(now());
  ParsedMesh parsed = parse_mesh(request.bytes, request.format_hint);
  stage(IngestStage::kParsed);
  BagBuild build = build_bag_detailed(parsed.mesh, config_.words, index_.split_registry());
  const ContentHash hash = canonical_hash(build.weld.mesh);
  stage(IngestStage::kBagBuilt);

  std::optional<DuplicateMatch> match;
  for (const DuplicateMatch& d : find_duplicates(hash, build.bag)) {
    if (d.kind == MatchKind::kExact || config_.merge_geometric) {
      match = d;
      break;
    }
  }
  stage(IngestStage::kDeduped);

  if (match) {
    ModelRecord& rec = records_.at(match->model_id);
    const bool known_source = std::find(rec.sources.begin(), rec.sources.end(), request.source) != rec.sources.end();
    if (known_source && match->kind == MatchKind::kExact) return {rec, false, match};
    const ModelRecord before = rec;
    const auto freshness_before = freshness_;
    try {
      if (!known_source) rec.sources.push_back(request.source);
      rec.history.push_back({ts, "merge-" + std::string(to_string(match->kind)), request.actor});
      if (request.source.url == kInternalUpload) rec.provenance = Provenance::kInternal;
      touch_freshness(request.source, ts);
      stage(IngestStage::kRecorded);
      persist();
    } catch (...) {
      rec = before;
      freshness_ = freshness_before;
      throw;
    }
    return {rec, false, match};
  }

  const std::uint64_t sequence_before = sequence_;
  const auto freshness_before = freshness_;
  const std::string id = next_model_id(hash);
  ModelRecord rec;
  rec.id = id;
  rec.name = request.name;
  rec.description = request.description;
  rec.tags = request.tags;
  rec.sources = {request.source};
  if (!request.original_label.empty()) {
    rec.original_format = MeshFormat::kOther;
    rec.format_label = request.original_label;
  } else {
    rec.original_format = parsed.format;
  }
  rec.converter_version = std::string(kConverterVersion);
  rec.history = {{ts, "ingest", request.actor}};
  rec.hash = hash;
  rec.bag_id = id;
  rec.stats = build.stats;
  rec.provenance = request.source.url == kInternalUpload ? Provenance::kInternal : Provenance::kExternal;
  rec.chain = {id, {{1, hash, ts, "initial"}}};

  WordBag bag = std::move(build.bag);
  bag.model_id = id;
  const bool blob_was_new = !has_blob(hash);
  bool indexed = false;
  bool recorded = false;
  try {
    store_blob(hash, request.bytes);
    stage(IngestStage::kBlobStored);
    index_.insert(std::move(bag));
    indexed = true;
    stage(IngestStage::kIndexed);
    records_.emplace(id, rec);
    active_by_hash_[hash] = id;
    recorded = true;
    touch_freshness(request.source, ts);
    stage(IngestStage::kRecorded);
    persist();
  } catch (...) {
    if (recorded) {
      records_.erase(id);
      active_by_hash_.erase(hash);
    }
    if (indexed) index_.remove(id);
    if (blob_was_new) delete_blob(hash);
    sequence_ = sequence_before;
    freshness_ = freshness_before;
    throw;
  }
  ++generation_;
  return {records_.at(id), true, std::nullopt};
}

std::vector<DuplicateMatch> Catalog::find_duplicates(const ContentHash& hash, const WordBag& bag) const {
  std::vector<DuplicateMatch> out;
  if (auto it = active_by_hash_.find(hash); it != active_by_hash_.end()) out.push_back({it->second, MatchKind::kExact, 1.0});

  auto weight = [this](WordId w) { return index_.weight(w); };
  // Any model scoring >= tau must share a word from the heaviest prefix of
  // the query holding more than 1 - tau^2 of its squared weighted mass
  // (Cauchy-Schwarz), so only those posting lists are scanned.
  std::vector<std::pair<double, WordId>> mass;
  double total = 0.0;
  for (const WordCount& wc : bag.words) {
    const double v = wc.count * weight(wc.word);
    if (v > 0.0) {
      mass.emplace_back(v * v, wc.word);
      total += v * v;
    }
  }
  if (!(total > 0.0)) return out;
  std::sort(mass.begin(), mass.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const double tau = config_.duplicate_threshold;
  std::vector<WordId> prefix;
  double remaining = total;
  for (const auto& [m, word] : mass) {
    if (remaining < tau * tau * total) break;
    prefix.push_back(word);
    remaining -= m;
  }

  std::vector<DuplicateMatch> geometric;
  const double query_norm2 = weighted_norm(bag, weight);
  for (ModelSlot slot : index_.candidate_slots_for(prefix, Exec::kSerial)) {
    const WordBag& target = index_.slot_bag(slot);
    const double s = score_similarity(bag, target, weight, query_norm2, weighted_norm(target, weight));
    if (s >= tau && (out.empty() || out.front().model_id != target.model_id)) {
      geometric.push_back({target.model_id, MatchKind::kGeometric, s});
    }
  }
  std::sort(geometric.begin(), geometric.end(), [](const DuplicateMatch& a, const DuplicateMatch& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.model_id < b.model_id;
  });
  out.insert(out.end(), geometric.begin(), geometric.end());
  return out;
}

const VersionChain& Catalog::record_version(const std::string& model_id, std::span<const std::uint8_t> bytes,
                                            const std::string& note, std::optional<std::int64_t> timestamp) {
  auto it = records_.find(model_id);
  if (it == records_.end()) throw Error(ErrorCode::kNotFound, "unknown model '" + model_id + "'");
  ModelRecord& rec = it->second;
  if (rec.state != LifecycleState::kActive) throw Error(ErrorCode::kGone, "model '" + model_id + "' was taken down");
  const std::int64_t ts = timestamp.value_or(now());

  ParsedMesh parsed = parse_mesh(bytes, hint_for(rec.original_format));
  BagBuild build = build_bag_detailed(parsed.mesh, config_.words, index_.split_registry());
  const ContentHash hash = canonical_hash(build.weld.mesh);
  if (hash == rec.hash) throw Error(ErrorCode::kNoChange, "no change: content matches the current version");
  if (auto other = active_by_hash_.find(hash); other != active_by_hash_.end()) {
    throw Error(ErrorCode::kAlreadyExists, "content matches model '" + other->second + "'");
  }

  const ModelRecord before = rec;
  const WordBag old_bag = *index_.bag(model_id);
  const bool blob_was_new = !has_blob(hash);
  WordBag bag = std::move(build.bag);
  bag.model_id = model_id;
  bool swapped = false;
  try {
    store_blob(hash, bytes);
    index_.remove(model_id);
    index_.insert(std::move(bag));
    swapped = true;
    active_by_hash_.erase(rec.hash);
    active_by_hash_[hash] = model_id;
    rec.hash = hash;
    rec.stats = build.stats;
    rec.chain.versions.push_back({rec.chain.versions.back().version + 1, hash, ts, note});
    rec.history.push_back({ts, "version", "ingest"});
    persist();
  } catch (...) {
    if (swapped) {
      index_.remove(model_id);
      active_by_hash_.erase(hash);
    }
    if (!index_.contains(model_id)) index_.insert(old_bag);
    active_by_hash_[before.hash] = model_id;
    rec = before;
    if (blob_was_new) delete_blob(hash);
    throw;
  }
  ++generation_;
  return rec.chain;
}

void Catalog::take_down(const std::string& model_id, const std::string& actor, std::optional<std::int64_t> timestamp) {
  auto it = records_.find(model_id);
  if (it == records_.end()) throw Error(ErrorCode::kNotFound, "unknown model '" + model_id + "'");
  ModelRecord& rec = it->second;
  if (rec.state == LifecycleState::kTakenDown) throw Error(ErrorCode::kGone, "model '" + model_id + "' already taken down");
  const std::int64_t ts = timestamp.value_or(now());

  const ModelRecord before = rec;
  const WordBag old_bag = *index_.bag(model_id);
  try {
    index_.remove(model_id);
    active_by_hash_.erase(rec.hash);
    rec.state = LifecycleState::kTakenDown;
    rec.history.push_back({ts, "takedown", actor});
    persist();
  } catch (...) {
    if (!index_.contains(model_id)) index_.insert(old_bag);
    active_by_hash_[before.hash] = model_id;
    rec = before;
    throw;
  }
  ++generation_;

  if (rec.provenance == Provenance::kExternal) {
    for (const VersionEntry& v : rec.chain.versions) {
      bool shared = false;
      for (const auto& [id, other] : records_) {
        if (id == model_id || other.state != LifecycleState::kActive) continue;
        for (const VersionEntry& ov : other.chain.versions) shared = shared || ov.hash == v.hash;
      }
      if (!shared) delete_blob(v.hash);
    }
  }
}

std::vector<std::string> Catalog::due_for_recrawl(std::int64_t now) const {
  std::vector<const FreshnessRecord*> stale;
  for (const auto& [domain, f] : freshness_) {
    if (f.staleness(now) > f.interval) stale.push_back(&f);
  }
  std::sort(stale.begin(), stale.end(), [now](const FreshnessRecord* a, const FreshnessRecord* b) {
    return a->staleness(now) != b->staleness(now) ? a->staleness(now) > b->staleness(now) : a->domain < b->domain;
  });
  std::vector<std::string> out;
  for (const FreshnessRecord* f : stale) out.push_back(f->domain);
  return out;
}

const ModelRecord* Catalog::find(const std::string& model_id) const {
  auto it = records_.find(model_id);
  return it == records_.end() ? nullptr : &it->second;
}

const ModelRecord& Catalog::record(const std::string& model_id) const {
  const ModelRecord* r = find(model_id);
  if (r == nullptr) throw Error(ErrorCode::kNotFound, "unknown model '" + model_id + "'");
  return *r;
}

std::vector<std::string> Catalog::record_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, rec] : records_) ids.push_back(id);
  return ids;
}

std::size_t Catalog::active_count() const {
  return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](const auto& kv) {
    return kv.second.state == LifecycleState::kActive;
  }));
}

WordBag Catalog::query_bag(std::span<const std::uint8_t> bytes, const std::string& format_hint) const {
  ParsedMesh parsed = parse_mesh(bytes, format_hint);
  WordBag bag = build_bag(parsed.mesh, config_.words, index_.split_registry());
  bag.model_id = "query";
  return bag;
}

std::vector<WordId> Catalog::mark_generic(double threshold) {
  const InvertedIndex before = index_;
  std::vector<WordId> marked;
  try {
    marked = index_.mark_generic(threshold);
    persist();
  } catch (...) {
    index_ = before;
    throw;
  }
  ++generation_;
  return marked;
}

std::vector<WordId> Catalog::split_generic_word(WordId word) {
  const InvertedIndex before = index_;
  std::vector<WordId> synonyms;
  try {
    synonyms = index_.split_generic_word(word, feature_provider());
    persist();
  } catch (...) {
    index_ = before;
    throw;
  }
  ++generation_;
  return synonyms;
}

InvertedIndex::FeatureProvider Catalog::feature_provider() const {
  return [this](const std::string& model_id) {
    const ModelRecord& rec = record(model_id);
    const auto bytes = blob(rec.hash);
    return derive_local_features(parse_mesh(bytes, hint_for(rec.original_format)).mesh, config_.words);
  };
}

Catalog::AuditReport Catalog::audit() const {
  AuditReport report;
  auto problem = [&](std::string what) {
    report.ok = false;
    report.problems.push_back(std::move(what));
  };
  for (std::string& p : index_.audit().problems) problem("index: " + p);
  for (const auto& [id, rec] : records_) {
    const bool active = rec.state == LifecycleState::kActive;
    if (active && !index_.contains(id)) problem("active record '" + id + "' missing from index");
    if (!active && index_.contains(id)) problem("taken-down record '" + id + "' still indexed");
    if (active) {
      auto h = active_by_hash_.find(rec.hash);
      if (h == active_by_hash_.end() || h->second != id) problem("hash map out of date for '" + id + "'");
    }
    for (std::size_t i = 1; i < rec.chain.versions.size(); ++i) {
      if (rec.chain.versions[i].version <= rec.chain.versions[i - 1].version) problem("version order broken for '" + id + "'");
      if (rec.chain.versions[i].hash == rec.chain.versions[i - 1].hash) problem("repeated version hash for '" + id + "'");
    }
  }
  for (const std::string& id : index_.model_ids()) {
    const ModelRecord* rec = find(id);
    if (rec == nullptr || rec->state != LifecycleState::kActive) problem("indexed model '" + id + "' has no active record");
  }
  for (const auto& [hash, id] : active_by_hash_) {
    const ModelRecord* rec = find(id);
    if (rec == nullptr || rec->state != LifecycleState::kActive || rec->hash != hash) problem("stale hash entry for '" + id + "'");
  }
  for (const auto& [domain, f] : freshness_) {
    if (f.interval <= 0) problem("non-positive recrawl interval for '" + domain + "'");
  }
  return report;
}

std::string Catalog::export_jsonl() const {
  std::string out;
  Json header;
  header["format"] = std::string(kExportFormat);
  header["version"] = kExportVersion;
  header["next_sequence"] = sequence_;
  out += header.dump() + "\n";
  for (const auto& [id, rec] : records_) {
    Json line;
    line["type"] = "record";
    const Json body = to_json(rec);
    for (const auto& [key, value] : body.items()) line[key] = value;
    out += line.dump() + "\n";
  }
  for (const auto& [domain, f] : freshness_) {
    Json line;
    line["type"] = "freshness";
    const Json body = to_json(f);
    for (const auto& [key, value] : body.items()) line[key] = value;
    out += line.dump() + "\n";
  }
  return out;
}

void Catalog::persist() {
  if (store_dir_.empty() || !autoflush_) return;
  flush();
}

void Catalog::flush() const {
  if (store_dir_.empty()) return;
  const fs::path dir(store_dir_);
  write_file((dir / kIndexFile).string() + ".tmp", index_.serialize());
  write_file((dir / kCatalogFile).string() + ".tmp", export_jsonl());
  rename_into_place((dir / kIndexFile).string() + ".tmp", dir / kIndexFile);
  rename_into_place((dir / kCatalogFile).string() + ".tmp", dir / kCatalogFile);
}

void Catalog::load_snapshot() {
  const fs::path dir(store_dir_);
  const auto bytes = read_file((dir / kCatalogFile).string());
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("catalog snapshot: ") + e.what(), line_no, ParseError::Unit::kLine);
    }
    if (line_no == 1) {
      if (j.value("format", "") != kExportFormat) throw Error(ErrorCode::kBadMagic, "not a gw3d catalog file");
      if (j.value("version", 0) != kExportVersion) {
        throw Error(ErrorCode::kVersionMismatch, "catalog format version " + std::to_string(j.value("version", 0)));
      }
      sequence_ = j.value("next_sequence", std::uint64_t{0});
      continue;
    }
    const std::string type = j.value("type", "");
    if (type == "record") {
      ModelRecord rec = record_from_json(j);
      records_.emplace(rec.id, std::move(rec));
    } else if (type == "freshness") {
      FreshnessRecord f = freshness_from_json(j);
      freshness_.emplace(f.domain, std::move(f));
    } else {
      throw ParseError("catalog snapshot: unknown line type '" + type + "'", line_no, ParseError::Unit::kLine);
    }
  }
  if (fs::exists(dir / kIndexFile)) {
    index_ = InvertedIndex::load((dir / kIndexFile).string());
    config_.words = index_.config();
  }
  for (const auto& [id, rec] : records_) {
    if (rec.state == LifecycleState::kActive) active_by_hash_[rec.hash] = id;
  }
  const AuditReport report = audit();
  if (!report.ok) throw Error(ErrorCode::kCorrupt, "store at '" + store_dir_ + "' is inconsistent: " + report.problems.front());
}

bool Catalog::accepts(const std::string& model_id, const Filters& filters) const {
  const ModelRecord* rec = find(model_id);
  if (rec == nullptr || rec->state != LifecycleState::kActive) return false;
  if (filters.watertight && rec->stats.watertight != *filters.watertight) return false;
  if (filters.consistent_normals && rec->stats.consistent_normals != *filters.consistent_normals) return false;
  if (filters.filetype) {
    const std::string type = rec->filetype();
    const std::string& want = *filters.filetype;
    if (type != want && type.rfind(want + "-", 0) != 0) return false;
  }
  if (filters.source_domain) {
    const bool any = std::any_of(rec->sources.begin(), rec->sources.end(),
                                 [&](const Source& s) { return s.domain == *filters.source_domain; });
    if (!any) return false;
  }
  return true;
}

Provenance Catalog::provenance(const std::string& model_id) const {
  const ModelRecord* rec = find(model_id);
  return rec != nullptr ? rec->provenance : Provenance::kExternal;
}

void Catalog::for_each_text(const std::function<void(const std::string&, const std::string&)>& fn) const {
  for (const auto& [id, rec] : records_) {
    if (rec.state != LifecycleState::kActive) continue;
    std::string text = rec.name + " " + rec.description;
    for (const std::string& tag : rec.tags) text += " " + tag;
    fn(id, text);
  }
}

}  // namespace gw3d
