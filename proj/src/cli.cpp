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

#include "gw3d/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "gw3d/analysis.hpp"
#include "gw3d/catalog.hpp"
#include "gw3d/error.hpp"
#include "gw3d/generators.hpp"
#include "gw3d/json_codec.hpp"
#include "gw3d/marching_cubes.hpp"
#include "gw3d/mesh_io.hpp"
#include "gw3d/service.hpp"
#include "gw3d/ttd.hpp"

namespace gw3d {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::kInternal || code == ErrorCode::kStorage ? kExitInternal : kExitUser;
}

ErrorCode error_code_from_string(const std::string& text) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kInternal); ++c) {
    if (to_string(static_cast<ErrorCode>(c)) == text) return static_cast<ErrorCode>(c);
  }
  return ErrorCode::kInternal;
}

std::string extension_hint(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".stl") return "stl";
  if (ext == ".obj") return "obj";
  return "";
}

void write_mesh(const TriangleMesh& mesh, const std::string& path) {
  if (extension_hint(path) == "obj") {
    write_file(path, write_obj(mesh));
  } else {
    write_file(path, write_stl_binary(mesh));
  }
}

struct Globals {
  std::string store;
  std::string format = "text";
  std::string remote;

  bool json() const { return format == "json"; }
};

struct FilterArgs {
  std::string watertight, normals, filetype, source;

  void add_to(CLI::App* app) {
    app->add_option("--watertight", watertight, "true|false");
    app->add_option("--normals", normals, "consistent normals: true|false");
    app->add_option("--filetype", filetype, "e.g. stl, obj");
    app->add_option("--source", source, "source domain");
  }

  std::map<std::string, std::string> params() const {
    std::map<std::string, std::string> p;
    if (!watertight.empty()) p["watertight"] = watertight;
    if (!normals.empty()) p["normals"] = normals;
    if (!filetype.empty()) p["filetype"] = filetype;
    if (!source.empty()) p["source"] = source;
    return p;
  }
};

class Runner {
 public:
  Runner(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  Catalog& catalog() {
    if (!catalog_) {
      CatalogConfig config;
      if (const char* now = std::getenv("GW3D_NOW")) {
        const std::int64_t fixed = std::stoll(now);
        config.clock = [fixed] { return fixed; };
      }
      catalog_ = std::make_unique<Catalog>(Catalog::open(g_.store, config));
      catalog_->set_autoflush(false);
    }
    return *catalog_;
  }

  void flush() {
    if (catalog_) catalog_->flush();
  }

  httplib::Client& client() {
    if (!client_) {
      client_ = std::make_unique<httplib::Client>(g_.remote);
      client_->set_read_timeout(300, 0);
    }
    return *client_;
  }

  // Decodes a /v1 response, turning error bodies back into module errors.
  Json remote(const httplib::Result& res) {
    if (!res) throw Error(ErrorCode::kStorage, "cannot reach " + g_.remote + ": " + httplib::to_string(res.error()));
    Json body;
    try {
      body = Json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kInternal, "non-JSON response with status " + std::to_string(res->status));
    }
    if (res->status >= 400) {
      const Json& e = body.at("error");
      throw Error(error_code_from_string(e.at("code").get<std::string>()), e.at("message").get<std::string>());
    }
    return body;
  }

  void emit(const Json& j, const std::function<void()>& text) {
    if (g_.json()) {
      out_ << j.dump() << "\n";
    } else {
      text();
    }
  }

  void print_results(const Json& j) {
    emit(j, [&] {
      out_ << "rank  score             model_id       provenance\n";
      int rank = 1;
      for (const Json& r : j.at("results")) {
        out_ << std::left << std::setw(6) << rank++ << std::setw(18) << std::setprecision(12)
             << r.at("score").get<double>() << std::setw(15) << r.at("model_id").get<std::string>()
             << r.at("provenance").get<std::string>() << "\n";
      }
    });
  }

  const Globals& g_;
  std::ostream& out_;
  std::unique_ptr<Catalog> catalog_;
  std::unique_ptr<httplib::Client> client_;
};

httplib::MultipartFormDataItems multipart(const std::string& path, const std::map<std::string, std::string>& fields) {
  const auto bytes = read_file(path);
  httplib::MultipartFormDataItems items;
  items.push_back({"file", std::string(bytes.begin(), bytes.end()), fs::path(path).filename().string(),
                   "application/octet-stream"});
  for (const auto& [key, value] : fields) items.push_back({key, value, "", ""});
  return items;
}

std::string query_string(const std::map<std::string, std::string>& params) {
  httplib::Params p(params.begin(), params.end());
  return httplib::detail::params_to_query_str(p);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gw3d: 3D model search with geometric words"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  if (const char* env = std::getenv("GW3D_STORE")) g.store = env;
  if (g.store.empty()) g.store = "gw3d-store";
  app.add_option("--store", g.store, "store directory (env GW3D_STORE)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--remote", g.remote, "base URL of a running service, e.g. http://127.0.0.1:8080");

  Runner run(g, out);
  std::function<void()> action;

  // ingest
  std::vector<std::string> ingest_paths;
  std::string ingest_source = "local", ingest_url, ingest_name, ingest_desc, ingest_tags, ingest_label;
  CLI::App* ingest = app.add_subcommand("ingest", "add mesh files to the catalog");
  ingest->add_option("paths", ingest_paths, "STL or OBJ files")->required();
  ingest->add_option("--source", ingest_source, "source domain");
  ingest->add_option("--url", ingest_url, "source URL (default: internal upload)");
  ingest->add_option("--name", ingest_name, "display name (default: file stem)");
  ingest->add_option("--description", ingest_desc);
  ingest->add_option("--tags", ingest_tags, "comma-separated");
  ingest->add_option("--original-format", ingest_label, "label of the pre-conversion format");
  ingest->callback([&] {
    action = [&] {
      Json all = Json::array();
      for (const std::string& path : ingest_paths) {
        std::map<std::string, std::string> fields{{"source", ingest_source}};
        const std::string name = ingest_name.empty() ? fs::path(path).stem().string() : ingest_name;
        fields["name"] = name;
        if (!ingest_url.empty()) fields["source_url"] = ingest_url;
        if (!ingest_desc.empty()) fields["description"] = ingest_desc;
        if (!ingest_tags.empty()) fields["tags"] = ingest_tags;
        if (!ingest_label.empty()) fields["original_format"] = ingest_label;
        Json j;
        if (!g.remote.empty()) {
          j = run.remote(run.client().Post("/v1/models", multipart(path, fields)));
        } else {
          IngestRequest in;
          in.bytes = read_file(path);
          in.format_hint = extension_hint(path);
          in.name = name;
          in.description = ingest_desc;
          std::stringstream tags(ingest_tags);
          for (std::string t; std::getline(tags, t, ',');) {
            if (!t.empty()) in.tags.push_back(t);
          }
          in.source = {ingest_source, ingest_url.empty() ? std::string(kInternalUpload) : ingest_url};
          in.original_label = ingest_label;
          in.actor = "cli";
          try {
            j = ingest_json(run.catalog().ingest(in));
          } catch (...) {
            run.flush();
            throw;
          }
        }
        all.push_back(j);
        if (!g.json()) {
          const Json& rec = j.at("record");
          out << rec.at("id").get<std::string>();
          if (!j.at("created").get<bool>()) out << " (merged, " << j.at("merged_with").at("kind").get<std::string>() << ")";
          out << "\n";
        }
      }
      run.flush();
      if (g.json()) out << all.dump() << "\n";
    };
  });

  // search
  std::string query_path, mode_text = "similar";
  std::size_t k = 10;
  FilterArgs search_filters;
  CLI::App* search = app.add_subcommand("search", "similar or part-in-whole search by example mesh");
  search->add_option("--query", query_path, "query mesh")->required()->check(CLI::ExistingFile);
  search->add_option("--mode", mode_text)->check(CLI::IsMember({"similar", "pip"}));
  search->add_option("-k", k, "results to return")->check(CLI::Range(1, 1000));
  search_filters.add_to(search);
  search->callback([&] {
    action = [&] {
      const SearchMode mode = search_mode_from_string(mode_text);
      if (!g.remote.empty()) {
        auto fields = search_filters.params();
        fields["k"] = std::to_string(k);
        run.print_results(run.remote(run.client().Post("/v1/search/" + mode_text, multipart(query_path, fields))));
        return;
      }
      Catalog& c = run.catalog();
      SearchQuery q;
      q.mode = mode;
      q.k = k;
      q.filters = parse_filters(search_filters.params());
      q.bag = c.query_bag(read_file(query_path), extension_hint(query_path));
      run.print_results(search_json(mode, k, run_query(c.index(), c, q)));
    };
  });

  // text
  std::string text_query;
  std::size_t text_k = 10;
  FilterArgs text_filters;
  CLI::App* text = app.add_subcommand("text", "keyword search over names, descriptions and tags");
  text->add_option("-q", text_query, "query string")->required();
  text->add_option("-k", text_k)->check(CLI::Range(1, 1000));
  text_filters.add_to(text);
  text->callback([&] {
    action = [&] {
      if (!g.remote.empty()) {
        auto params = text_filters.params();
        params["q"] = text_query;
        params["k"] = std::to_string(text_k);
        run.print_results(run.remote(run.client().Get("/v1/search/text?" + query_string(params))));
        return;
      }
      run.print_results(search_json(SearchMode::kText, text_k,
                                    text_search(run.catalog(), text_query, text_k, parse_filters(text_filters.params()))));
    };
  });

  // delete
  std::string delete_id;
  CLI::App* del = app.add_subcommand("delete", "take a model down");
  del->add_option("id", delete_id)->required();
  del->callback([&] {
    action = [&] {
      Json j;
      if (!g.remote.empty()) {
        j = run.remote(run.client().Delete("/v1/models/" + delete_id));
      } else {
        run.catalog().take_down(delete_id, "cli");
        run.flush();
        j = takedown_json(run.catalog().record(delete_id));
      }
      run.emit(j, [&] { out << j.at("id").get<std::string>() << " " << j.at("state").get<std::string>() << "\n"; });
    };
  });

  // stats
  bool want_histogram = false, want_fit = false, fixed_bins = false;
  BinSpec bins;
  std::string svg_path, csv_path;
  CLI::App* stats = app.add_subcommand("stats", "corpus statistics and perimeter diagnostics");
  stats->add_flag("--perimeter-histogram", want_histogram, "histogram of facet perimeters over active models");
  stats->add_flag("--fit-gamma", want_fit, "fit a gamma distribution to the perimeters");
  stats->add_option("--bins", bins.bins)->check(CLI::Range(1, 100000));
  stats->add_option("--lo", bins.lo);
  stats->add_option("--hi", bins.hi);
  stats->add_flag("--fixed-width", fixed_bins, "equal-width bins instead of log-width");
  stats->add_option("--svg", svg_path, "write an SVG plot");
  stats->add_option("--csv", csv_path, "write the histogram as CSV");
  stats->callback([&] {
    action = [&] {
      if (!want_histogram && !want_fit) {
        const Json j = !g.remote.empty() ? run.remote(run.client().Get("/v1/stats")) : stats_json(run.catalog());
        run.emit(j, [&] {
          for (const auto& [key, value] : j.items()) {
            if (key != "df") out << key << ": " << value.dump() << "\n";
          }
          out << "df: min " << j["df"]["min"].dump() << ", median " << j["df"]["median"].dump() << ", max "
              << j["df"]["max"].dump() << "\n";
        });
        return;
      }
      if (!g.remote.empty()) throw Error(ErrorCode::kInvalidArgument, "perimeter diagnostics need a local store");
      Catalog& c = run.catalog();
      std::vector<double> perimeters;
      for (const std::string& id : c.record_ids()) {
        const ModelRecord& rec = c.record(id);
        if (rec.state != LifecycleState::kActive) continue;
        const auto mesh = parse_mesh(c.blob(rec.hash), rec.filetype().rfind("stl", 0) == 0 ? "stl" : "").mesh;
        const auto p = facet_perimeters(mesh, c.word_config());
        perimeters.insert(perimeters.end(), p.begin(), p.end());
      }
      if (perimeters.empty()) throw Error(ErrorCode::kInvalidArgument, "no perimeters: the catalog has no active models");
      bins.policy = fixed_bins ? BinPolicy::kFixedWidth : BinPolicy::kLogWidth;
      const Histogram h = histogram_of(perimeters, bins);
      std::optional<GammaFit> fit;
      if (want_fit) fit = fit_gamma(perimeters);
      if (!svg_path.empty()) write_file(svg_path, histogram_svg(h, fit, "facet perimeters"));
      if (!csv_path.empty()) write_file(csv_path, h.to_csv());
      Json j;
      j["samples"] = perimeters.size();
      j["histogram"] = to_json(h);
      j["fit"] = fit ? to_json(*fit) : Json(nullptr);
      run.emit(j, [&] {
        out << "samples: " << perimeters.size() << "\n" << h.to_csv();
        if (fit) out << gamma_fit_text(*fit);
      });
    };
  });

  // gen
  CLI::App* gen = app.add_subcommand("gen", "synthetic meshes and test corpora");
  gen->require_subcommand(1);
  double torus_R = 1.0, torus_r = 0.25, torus_offset = 0.0;
  int torus_res = 12;
  std::string gen_out;
  CLI::App* torus = gen->add_subcommand("torus", "marching-cubes torus (grid planes tangent by default)");
  torus->add_option("--R", torus_R, "major radius")->check(CLI::PositiveNumber);
  torus->add_option("--r", torus_r, "minor radius")->check(CLI::PositiveNumber);
  torus->add_option("--res", torus_res, "grid cells per minor radius")->check(CLI::Range(1, 512));
  torus->add_option("--offset", torus_offset, "grid shift along every axis, in cells");
  torus->add_option("-o,--output", gen_out)->required();
  torus->callback([&] {
    action = [&] {
      const TriangleMesh mesh = make_torus(torus_R, torus_r, torus_res, {torus_offset, torus_offset, torus_offset});
      write_mesh(mesh, gen_out);
      const Json j{{"path", gen_out}, {"triangles", mesh.triangles.size()}};
      run.emit(j, [&] { out << gen_out << ": " << mesh.triangles.size() << " triangles\n"; });
    };
  });
  LatticeSpec lattice;
  std::uint64_t lattice_seed = 1;
  CLI::App* support = gen->add_subcommand("support", "slab with a grid of pillars");
  support->add_option("--pillars", lattice.pillars)->check(CLI::Range(1, 100000));
  support->add_option("--seed", lattice_seed);
  support->add_option("--jitter", lattice.jitter, "fraction of the pillar pitch");
  support->add_option("-o,--output", gen_out)->required();
  support->callback([&] {
    action = [&] {
      const TriangleMesh mesh = gen_support_lattice(lattice, lattice_seed);
      write_mesh(mesh, gen_out);
      const Json j{{"path", gen_out}, {"triangles", mesh.triangles.size()}};
      run.emit(j, [&] { out << gen_out << ": " << mesh.triangles.size() << " triangles\n"; });
    };
  });
  std::string ttd_spec_path;
  std::optional<std::uint64_t> ttd_seed;
  CLI::App* ttd = gen->add_subcommand("ttd", "labeled part-in-whole test corpus");
  ttd->add_option("--spec", ttd_spec_path, "JSON corpus parameters")->check(CLI::ExistingFile);
  ttd->add_option("--seed", ttd_seed);
  ttd->add_option("-o,--output", gen_out, "output directory")->required();
  ttd->callback([&] {
    action = [&] {
      TTDSpec spec;
      if (!ttd_spec_path.empty()) {
        const auto bytes = read_file(ttd_spec_path);
        spec = TTDSpec::from_json(std::string(bytes.begin(), bytes.end()));
      }
      if (ttd_seed) spec.seed = *ttd_seed;
      const TTDCorpus corpus = gen_ttd(spec);
      write_ttd(corpus, gen_out);
      const Json j{{"path", gen_out},
                   {"parts", corpus.parts.size()},
                   {"composites", corpus.composites.size()},
                   {"distractors", corpus.distractors.size()}};
      run.emit(j, [&] {
        out << gen_out << ": " << corpus.parts.size() << " parts, " << corpus.composites.size() << " composites, "
            << corpus.distractors.size() << " distractors\n";
      });
    };
  });

  // index
  CLI::App* index = app.add_subcommand("index", "index persistence and maintenance");
  index->require_subcommand(1);
  std::string index_path;
  CLI::App* save = index->add_subcommand("save", "write the store's index to a file");
  save->add_option("path", index_path)->required();
  save->callback([&] {
    action = [&] {
      run.catalog().index().save(index_path);
      const Json j{{"path", index_path}, {"models", run.catalog().index().model_count()}};
      run.emit(j, [&] { out << "saved " << j["models"] << " models to " << index_path << "\n"; });
    };
  });
  CLI::App* load = index->add_subcommand("load", "verify an index file and summarise it");
  load->add_option("path", index_path)->required()->check(CLI::ExistingFile);
  load->callback([&] {
    action = [&] {
      const InvertedIndex idx = InvertedIndex::load(index_path);
      const Json j{{"path", index_path},
                   {"models", idx.model_count()},
                   {"words", idx.word_count()},
                   {"generic_words", idx.generic_words().size()}};
      run.emit(j, [&] { out << idx.stats_text(); });
    };
  });
  CLI::App* audit = index->add_subcommand("audit", "check catalog and index consistency");
  int audit_exit = kExitOk;
  audit->callback([&] {
    action = [&] {
      const Catalog::AuditReport report = run.catalog().audit();
      const Json j{{"ok", report.ok}, {"problems", report.problems}};
      run.emit(j, [&] {
        out << (report.ok ? "ok" : "inconsistent") << "\n";
        for (const std::string& p : report.problems) out << "  " << p << "\n";
      });
      if (!report.ok) audit_exit = kExitInternal;
    };
  });
  double generic_threshold = 0.25;
  CLI::App* generic = index->add_subcommand("generic", "exclude words present in more than a fraction of models");
  generic->add_option("--threshold", generic_threshold)->check(CLI::Range(0.0, 1.0));
  generic->callback([&] {
    action = [&] {
      const std::vector<WordId> marked = run.catalog().mark_generic(generic_threshold);
      run.flush();
      Json words = Json::array();
      for (WordId w : marked) words.push_back(word_hex(w));
      const Json j{{"marked", words}};
      run.emit(j, [&] { out << marked.size() << " words marked generic\n"; });
    };
  });
  std::string split_word;
  CLI::App* split = index->add_subcommand("split", "replace a generic word by finer synonyms");
  split->add_option("word", split_word, "word id in hex")->required();
  split->callback([&] {
    action = [&] {
      const std::vector<WordId> synonyms = run.catalog().split_generic_word(word_from_hex(split_word));
      run.flush();
      Json words = Json::array();
      for (WordId w : synonyms) words.push_back(word_hex(w));
      const Json j{{"synonyms", words}};
      run.emit(j, [&] { out << synonyms.size() << " synonyms\n"; });
    };
  });

  // serve
  ApiConfig api;
  CLI::App* serve = app.add_subcommand("serve", "run the /v1 HTTP API over the store");
  serve->add_option("--port", api.port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", api.host);
  serve->add_option("--max-upload", api.max_upload_bytes, "bytes");
  serve->add_option("--related-k", api.related_k);
  serve->callback([&] {
    action = [&] {
      Repository repo(std::move(run.catalog()));
      repo.catalog.set_autoflush(true);
      Service service(repo, api);
      const int port = service.bind();
      err << "listening on " << api.host << ":" << port << std::endl;
      service.run();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUser;
  }

  try {
    if (action) action();
    return audit_exit;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace gw3d
