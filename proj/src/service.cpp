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

#include "gw3d/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

#include "gw3d/analysis.hpp"
#include "gw3d/error.hpp"

namespace gw3d {

void ApiConfig::validate() const {
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "port must be in [0, 65535]");
  if (max_upload_bytes == 0) throw Error(ErrorCode::kInvalidArgument, "upload limit must be positive");
  if (related_k == 0) throw Error(ErrorCode::kInvalidArgument, "related k must be positive");
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyBag:
    case ErrorCode::kNoChange:
    case ErrorCode::kQueryTooGeneric:
    case ErrorCode::kZeroVariance:
    case ErrorCode::kNonPositiveSample:
    case ErrorCode::kOverlap: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kAlreadyExists: return 409;
    case ErrorCode::kGone: return 410;
    case ErrorCode::kTooLarge: return 413;
    case ErrorCode::kStorage:
    case ErrorCode::kBadMagic:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kChecksum:
    case ErrorCode::kCorrupt: return 503;
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

std::vector<SearchResult> RelatedCache::compute(const Catalog& catalog, const std::string& model_id, std::size_t k) {
  const ModelRecord& rec = catalog.record(model_id);
  if (rec.state != LifecycleState::kActive) throw Error(ErrorCode::kGone, "model '" + model_id + "' was taken down");
  SearchQuery query;
  query.mode = SearchMode::kSimilar;
  query.bag = *catalog.index().bag(model_id);
  query.k = k + 1;
  std::vector<SearchResult> results = query_similar(catalog.index(), &catalog, query);
  std::erase_if(results, [&](const SearchResult& r) { return r.model_id == model_id; });
  if (results.size() > k) results.resize(k);
  return results;
}

std::vector<SearchResult> RelatedCache::get(const Catalog& catalog, const std::string& model_id) {
  const std::uint64_t generation = catalog.generation();
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(model_id);
    if (it != entries_.end() && it->second.generation == generation) return it->second.results;
  }
  std::vector<SearchResult> results = compute(catalog, model_id, k_);
  std::lock_guard lock(mutex_);
  entries_[model_id] = {generation, results};
  return results;
}

void RelatedCache::erase(const std::string& model_id) {
  std::lock_guard lock(mutex_);
  entries_.erase(model_id);
}

bool RelatedCache::contains(const std::string& model_id) const {
  std::lock_guard lock(mutex_);
  return entries_.contains(model_id);
}

std::size_t RelatedCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::map<std::string, std::vector<SearchResult>> RelatedCache::snapshot() const {
  std::lock_guard lock(mutex_);
  std::map<std::string, std::vector<SearchResult>> out;
  for (const auto& [id, entry] : entries_) out.emplace(id, entry.results);
  return out;
}

Json ingest_json(const IngestResult& result) {
  Json j;
  j["created"] = result.created;
  j["merged_with"] = result.merged_with ? to_json(*result.merged_with) : Json(nullptr);
  j["record"] = model_json(result.record);
  return j;
}

Json model_json(const ModelRecord& record) {
  Json j = to_json(record);
  j["filetype"] = record.filetype();
  return j;
}

Json related_json(const std::string& model_id, const std::vector<SearchResult>& results) {
  Json j;
  j["model_id"] = model_id;
  j["results"] = to_json(results);
  return j;
}

Json takedown_json(const ModelRecord& record) {
  Json j;
  j["id"] = record.id;
  j["state"] = std::string(to_string(record.state));
  return j;
}

Json search_json(SearchMode mode, std::size_t k, const std::vector<SearchResult>& results) {
  Json j;
  j["mode"] = std::string(to_string(mode));
  j["k"] = k;
  j["results"] = to_json(results);
  return j;
}

Json stats_json(const Catalog& catalog) {
  const InvertedIndex& index = catalog.index();
  const std::vector<WordId> words = index.words();
  std::vector<double> dfs;
  dfs.reserve(words.size());
  for (WordId w : words) dfs.push_back(index.df(w));
  std::sort(dfs.begin(), dfs.end());

  Json df;
  df["words"] = words.size();
  if (!dfs.empty()) {
    df["min"] = dfs.front();
    df["median"] = dfs[dfs.size() / 2];
    df["max"] = dfs.back();
    double sum = 0.0;
    for (double d : dfs) sum += d;
    df["mean"] = sum / static_cast<double>(dfs.size());
    // Powers-of-two buckets up to the corpus size.
    const double hi = std::exp2(std::ceil(std::log2(static_cast<double>(index.model_count()) + 1.0)));
    Histogram h = Histogram::log_width(1.0, std::max(hi, 2.0), static_cast<std::size_t>(std::max(1.0, std::log2(hi))));
    for (double d : dfs) h.add(d);
    df["histogram"] = to_json(h);
  } else {
    df["min"] = df["median"] = df["max"] = df["mean"] = nullptr;
    df["histogram"] = nullptr;
  }

  Json j;
  j["records"] = catalog.record_ids().size();
  j["active_models"] = catalog.active_count();
  j["taken_down"] = catalog.record_ids().size() - catalog.active_count();
  j["indexed_models"] = index.model_count();
  j["distinct_words"] = words.size();
  j["generic_words"] = index.generic_words().size();
  j["split_words"] = index.split_registry().size();
  j["generation"] = catalog.generation();
  j["df"] = df;
  return j;
}

namespace {

std::optional<bool> parse_tristate(const std::map<std::string, std::string>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || it->second.empty()) return std::nullopt;
  const std::string& v = it->second;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::kInvalidArgument, "filter '" + key + "' must be true or false, got '" + v + "'");
}

std::optional<std::string> parse_text(const std::map<std::string, std::string>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

}  // namespace

Filters parse_filters(const std::map<std::string, std::string>& params) {
  Filters f;
  f.watertight = parse_tristate(params, "watertight");
  f.consistent_normals = parse_tristate(params, "normals");
  f.filetype = parse_text(params, "filetype");
  f.source_domain = parse_text(params, "source");
  return f;
}

std::size_t parse_k(const std::string& text) {
  std::size_t k = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || end != text.data() + text.size() || k == 0 || k > 1000) {
    throw Error(ErrorCode::kInvalidArgument, "k must be an integer in [1, 1000], got '" + text + "'");
  }
  return k;
}

struct Service::Impl {
  Repository& repo;
  ApiConfig config;
  RelatedCache related;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  Impl(Repository& r, ApiConfig c) : repo(r), config(std::move(c)), related(config.related_k) {}

  static void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void fail(httplib::Response& res, ErrorCode code, const std::string& message) {
    reply(res, http_status(code), error_json(code, message));
  }

  // Runs a handler, mapping module errors to their HTTP statuses.
  template <typename Fn>
  static void guard(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      fail(res, e.code(), e.what());
    } catch (const std::exception& e) {
      fail(res, ErrorCode::kInternal, e.what());
    }
  }

  static std::map<std::string, std::string> params_of(const httplib::Request& req) {
    std::map<std::string, std::string> params;
    for (const auto& [key, value] : req.params) params[key] = value;
    for (const auto& [key, part] : req.files) {
      if (part.filename.empty()) params[key] = part.content;
    }
    return params;
  }

  const httplib::MultipartFormData& upload(const httplib::Request& req) const {
    if (!req.is_multipart_form_data() || !req.has_file("file")) {
      throw Error(ErrorCode::kInvalidArgument, "expected a multipart body with a 'file' part");
    }
    const auto& files = req.files;
    const auto& part = files.find("file")->second;
    if (part.content.size() > config.max_upload_bytes) {
      throw Error(ErrorCode::kTooLarge, "upload of " + std::to_string(part.content.size()) + " bytes exceeds limit of " +
                                            std::to_string(config.max_upload_bytes));
    }
    return part;
  }

  static std::span<const std::uint8_t> bytes_of(const std::string& s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
  }

  static std::string hint_from(const httplib::MultipartFormData& part, const std::map<std::string, std::string>& params) {
    if (auto it = params.find("format"); it != params.end()) return it->second;
    const auto dot = part.filename.rfind('.');
    if (dot == std::string::npos) return "";
    std::string ext = part.filename.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == "stl" || ext == "obj" ? ext : "";
  }

  void post_model(const httplib::Request& req, httplib::Response& res) {
    const auto& part = upload(req);
    const auto params = params_of(req);
    IngestRequest in;
    in.bytes.assign(part.content.begin(), part.content.end());
    in.format_hint = hint_from(part, params);
    in.name = params.contains("name") ? params.at("name") : part.filename;
    if (auto it = params.find("description"); it != params.end()) in.description = it->second;
    if (auto it = params.find("tags"); it != params.end()) {
      std::string tag;
      for (char c : it->second + ",") {
        if (c == ',') {
          if (!tag.empty()) in.tags.push_back(tag);
          tag.clear();
        } else if (c != ' ') {
          tag += c;
        }
      }
    }
    in.source.domain = params.contains("source") ? params.at("source") : "upload";
    in.source.url = params.contains("source_url") ? params.at("source_url") : std::string(kInternalUpload);
    if (auto it = params.find("original_format"); it != params.end()) in.original_label = it->second;
    in.actor = "api";

    IngestResult result;
    {
      std::unique_lock lock(repo.mutex);
      result = repo.catalog.ingest(in);
    }
    {
      std::shared_lock lock(repo.mutex);
      related.get(repo.catalog, result.record.id);
    }
    reply(res, result.created ? 201 : 200, ingest_json(result));
  }

  void get_model(const std::string& id, httplib::Response& res) {
    std::shared_lock lock(repo.mutex);
    const ModelRecord& rec = repo.catalog.record(id);
    if (rec.state != LifecycleState::kActive) throw Error(ErrorCode::kGone, "model '" + id + "' was taken down");
    reply(res, 200, model_json(rec));
  }

  void get_related(const std::string& id, httplib::Response& res) {
    std::shared_lock lock(repo.mutex);
    reply(res, 200, related_json(id, related.get(repo.catalog, id)));
  }

  void delete_model(const std::string& id, httplib::Response& res) {
    std::unique_lock lock(repo.mutex);
    repo.catalog.take_down(id, "api");
    related.erase(id);
    reply(res, 200, takedown_json(repo.catalog.record(id)));
  }

  void search_mesh(SearchMode mode, const httplib::Request& req, httplib::Response& res) {
    const auto& part = upload(req);
    const auto params = params_of(req);
    SearchQuery q;
    q.mode = mode;
    q.k = params.contains("k") ? parse_k(params.at("k")) : 10;
    q.filters = parse_filters(params);
    std::shared_lock lock(repo.mutex);
    q.bag = repo.catalog.query_bag(bytes_of(part.content), hint_from(part, params));
    reply(res, 200, search_json(mode, q.k, run_query(repo.catalog.index(), repo.catalog, q)));
  }

  void search_text(const httplib::Request& req, httplib::Response& res) {
    const auto params = params_of(req);
    const std::size_t k = params.contains("k") ? parse_k(params.at("k")) : 10;
    const Filters filters = parse_filters(params);
    const std::string q = params.contains("q") ? params.at("q") : "";
    std::shared_lock lock(repo.mutex);
    reply(res, 200, search_json(SearchMode::kText, k, text_search(repo.catalog, q, k, filters)));
  }

  void routes() {
    // Multipart framing adds overhead beyond the file itself.
    server.set_payload_max_length(config.max_upload_bytes + (std::size_t{1} << 20));
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 413) {
        fail(res, ErrorCode::kTooLarge, "request body too large");
      } else if (res.status == 404) {
        fail(res, ErrorCode::kNotFound, "no such endpoint");
      } else if (res.status >= 400 && res.status < 500) {
        const int status = res.status;
        fail(res, ErrorCode::kInvalidArgument, "bad request");
        res.status = status;
      }
    });
    server.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, Json{{"status", "ok"}}); });
    server.Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
      guard(res, [&] {
        std::shared_lock lock(repo.mutex);
        reply(res, 200, stats_json(repo.catalog));
      });
    });
    server.Post("/v1/models", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { post_model(req, res); });
    });
    server.Get(R"(/v1/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { get_model(req.matches[1], res); });
    });
    server.Get(R"(/v1/models/([^/]+)/related)", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { get_related(req.matches[1], res); });
    });
    server.Delete(R"(/v1/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { delete_model(req.matches[1], res); });
    });
    server.Post("/v1/search/similar", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { search_mesh(SearchMode::kSimilar, req, res); });
    });
    server.Post("/v1/search/pip", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { search_mesh(SearchMode::kPip, req, res); });
    });
    server.Get("/v1/search/text", [this](const httplib::Request& req, httplib::Response& res) {
      guard(res, [&] { search_text(req, res); });
    });
  }
};

Service::Service(Repository& repository, ApiConfig config) {
  config.validate();
  impl_ = std::make_unique<Impl>(repository, std::move(config));
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  Impl& s = *impl_;
  if (s.config.port == 0) {
    s.port = s.server.bind_to_any_port(s.config.host);
  } else {
    s.port = s.server.bind_to_port(s.config.host, s.config.port) ? s.config.port : -1;
  }
  if (s.port <= 0) {
    throw Error(ErrorCode::kStorage, "cannot bind " + s.config.host + ":" + std::to_string(s.config.port));
  }
  return s.port;
}

void Service::run() { impl_->server.listen_after_bind(); }

int Service::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

const RelatedCache& Service::related_cache() const { return impl_->related; }

}  // namespace gw3d
