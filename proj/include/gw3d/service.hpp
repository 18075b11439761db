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

#ifndef GW3D_SERVICE_HPP_
#define GW3D_SERVICE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gw3d/catalog.hpp"
#include "gw3d/json_codec.hpp"
#include "gw3d/search.hpp"

namespace gw3d {

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t max_upload_bytes = std::size_t{64} << 20;
  std::size_t related_k = 10;

  void validate() const;
};

// HTTP status for a module error.
int http_status(ErrorCode code);

// Top-k similar models per model id, tagged with the catalog generation they
// were computed at and recomputed once it moves.
class RelatedCache {
 public:
  explicit RelatedCache(std::size_t k) : k_(k) {}

  std::vector<SearchResult> get(const Catalog& catalog, const std::string& model_id);
  void erase(const std::string& model_id);
  bool contains(const std::string& model_id) const;
  std::size_t size() const;
  // Every cached entry, for coherence checks.
  std::map<std::string, std::vector<SearchResult>> snapshot() const;

  static std::vector<SearchResult> compute(const Catalog& catalog, const std::string& model_id, std::size_t k);

 private:
  struct Entry {
    std::uint64_t generation = 0;
    std::vector<SearchResult> results;
  };
  std::size_t k_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

// Response bodies shared by the service and the embedded CLI so both paths
// print the same bytes.
Json ingest_json(const IngestResult& result);
Json model_json(const ModelRecord& record);
Json related_json(const std::string& model_id, const std::vector<SearchResult>& results);
Json takedown_json(const ModelRecord& record);
Json search_json(SearchMode mode, std::size_t k, const std::vector<SearchResult>& results);
Json stats_json(const Catalog& catalog);

// Tri-state filter parsing from string parameters ("true"/"false"/"1"/"0").
Filters parse_filters(const std::map<std::string, std::string>& params);
std::size_t parse_k(const std::string& text);

// Catalog plus the single-writer lock.
struct Repository {
  Catalog catalog;
  std::shared_mutex mutex;

  explicit Repository(Catalog c) : catalog(std::move(c)) {}
};

class Service {
 public:
  Service(Repository& repository, ApiConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the port actually used.
  int bind();
  // Serves until stop(); bind() first.
  void run();
  // bind() + run() on a background thread.
  int start();
  void stop();

  const RelatedCache& related_cache() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gw3d

#endif  // GW3D_SERVICE_HPP_
