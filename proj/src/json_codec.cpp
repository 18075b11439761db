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

#include "gw3d/json_codec.hpp"

#include <cstdio>

namespace gw3d {

std::string word_hex(WordId word) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(word));
  return buf;
}

WordId word_from_hex(const std::string& hex) {
  if (hex.size() != 16) throw Error(ErrorCode::kParse, "word id must be 16 hex digits");
  std::size_t used = 0;
  const unsigned long long v = std::stoull(hex, &used, 16);
  if (used != hex.size()) throw Error(ErrorCode::kParse, "bad word id '" + hex + "'");
  return v;
}

namespace {

Json vec(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
Vec3 vec_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json to_json(const Bounds& b) {
  if (b.empty) return nullptr;
  return {{"min", vec(b.min)}, {"max", vec(b.max)}};
}

Json to_json(const MeshStats& s) {
  Json j;
  j["triangle_count"] = s.triangle_count;
  j["vertex_count"] = s.vertex_count;
  j["surface_area"] = s.surface_area;
  j["bbox"] = to_json(s.bbox);
  j["watertight"] = s.watertight;
  j["consistent_normals"] = s.consistent_normals;
  j["degenerate_facets"] = s.degenerate_facets;
  j["volume"] = s.volume ? Json(*s.volume) : Json(nullptr);
  return j;
}

MeshStats stats_from_json(const Json& j) {
  return guarded("stats", [&] {
    MeshStats s;
    s.triangle_count = j.at("triangle_count").get<std::size_t>();
    s.vertex_count = j.at("vertex_count").get<std::size_t>();
    s.surface_area = j.at("surface_area").get<double>();
    if (!j.at("bbox").is_null()) {
      s.bbox.min = vec_from(j.at("bbox").at("min"));
      s.bbox.max = vec_from(j.at("bbox").at("max"));
      s.bbox.empty = false;
    }
    s.watertight = j.at("watertight").get<bool>();
    s.consistent_normals = j.at("consistent_normals").get<bool>();
    s.degenerate_facets = j.at("degenerate_facets").get<std::vector<std::uint32_t>>();
    if (!j.at("volume").is_null()) s.volume = j.at("volume").get<double>();
    return s;
  });
}

Json to_json(const VersionChain& chain) {
  Json versions = Json::array();
  for (const VersionEntry& v : chain.versions) {
    versions.push_back({{"version", v.version}, {"hash", v.hash.hex()}, {"timestamp", v.timestamp}, {"note", v.note}});
  }
  return {{"model_id", chain.model_id}, {"versions", versions}};
}

Json to_json(const ModelRecord& r) {
  Json sources = Json::array();
  for (const Source& s : r.sources) sources.push_back({{"domain", s.domain}, {"url", s.url}});
  Json history = Json::array();
  for (const HistoryEntry& h : r.history) {
    history.push_back({{"timestamp", h.timestamp}, {"action", h.action}, {"actor", h.actor}});
  }
  Json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["description"] = r.description;
  j["tags"] = r.tags;
  j["sources"] = sources;
  j["original_format"] = std::string(to_string(r.original_format));
  j["format_label"] = r.format_label;
  j["converter_version"] = r.converter_version;
  j["history"] = history;
  j["content_hash"] = r.hash.hex();
  j["hash_algorithm"] = std::string(ContentHash::kAlgorithm);
  j["bag_id"] = r.bag_id;
  j["stats"] = to_json(r.stats);
  j["state"] = std::string(to_string(r.state));
  j["provenance"] = std::string(to_string(r.provenance));
  j["versions"] = to_json(r.chain).at("versions");
  return j;
}

ModelRecord record_from_json(const Json& j) {
  return guarded("record", [&] {
    ModelRecord r;
    r.id = j.at("id").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.tags = j.at("tags").get<std::vector<std::string>>();
    for (const auto& s : j.at("sources")) r.sources.push_back({s.at("domain").get<std::string>(), s.at("url").get<std::string>()});
    r.original_format = mesh_format_from_string(j.at("original_format").get<std::string>());
    r.format_label = j.at("format_label").get<std::string>();
    r.converter_version = j.at("converter_version").get<std::string>();
    for (const auto& h : j.at("history")) {
      r.history.push_back({h.at("timestamp").get<std::int64_t>(), h.at("action").get<std::string>(),
                           h.at("actor").get<std::string>()});
    }
    r.hash = ContentHash::from_hex(j.at("content_hash").get<std::string>());
    r.bag_id = j.at("bag_id").get<std::string>();
    r.stats = stats_from_json(j.at("stats"));
    r.state = lifecycle_from_string(j.at("state").get<std::string>());
    r.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    r.chain.model_id = r.id;
    for (const auto& v : j.at("versions")) {
      r.chain.versions.push_back({v.at("version").get<std::uint32_t>(), ContentHash::from_hex(v.at("hash").get<std::string>()),
                                  v.at("timestamp").get<std::int64_t>(), v.at("note").get<std::string>()});
    }
    return r;
  });
}

Json to_json(const FreshnessRecord& f) {
  return {{"domain", f.domain}, {"last_ingest", f.last_ingest}, {"interval", f.interval}};
}

FreshnessRecord freshness_from_json(const Json& j) {
  return guarded("freshness", [&] {
    return FreshnessRecord{j.at("domain").get<std::string>(), j.at("last_ingest").get<std::int64_t>(),
                           j.at("interval").get<std::int64_t>()};
  });
}

Json to_json(const DuplicateMatch& m) {
  return {{"model_id", m.model_id}, {"kind", std::string(to_string(m.kind))}, {"similarity", m.similarity}};
}

Json to_json(const SearchResult& r) {
  Json matched = Json::array();
  for (const MatchedWord& m : r.matched) {
    matched.push_back({{"word", word_hex(m.word)},
                       {"kind", std::string(to_string(word_kind(m.word)))},
                       {"query_count", m.query_count},
                       {"target_count", m.target_count},
                       {"weight", m.weight}});
  }
  return {{"model_id", r.model_id},
          {"score", r.score},
          {"provenance", std::string(to_string(r.provenance))},
          {"matched_words", matched}};
}

Json to_json(const std::vector<SearchResult>& results) {
  Json out = Json::array();
  for (const SearchResult& r : results) out.push_back(to_json(r));
  return out;
}

Json to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}, {"n", h.n}, {"underflow", h.underflow}, {"overflow", h.overflow}};
}

Json to_json(const GammaFit& f) {
  return {{"shape", f.shape},
          {"scale", f.scale},
          {"log_likelihood", f.log_likelihood},
          {"iterations", f.iterations},
          {"converged", f.converged}};
}

Json to_json(const Filters& f) {
  Json j = Json::object();
  if (f.watertight) j["watertight"] = *f.watertight;
  if (f.consistent_normals) j["normals"] = *f.consistent_normals;
  if (f.filetype) j["filetype"] = *f.filetype;
  if (f.source_domain) j["source"] = *f.source_domain;
  return j;
}

Json error_json(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

}  // namespace gw3d
