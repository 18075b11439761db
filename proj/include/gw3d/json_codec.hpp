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

#ifndef GW3D_JSON_CODEC_HPP_
#define GW3D_JSON_CODEC_HPP_

#include <string>
#include <vector>

#include "json.hpp"

#include "gw3d/analysis.hpp"
#include "gw3d/catalog.hpp"
#include "gw3d/error.hpp"
#include "gw3d/histogram.hpp"
#include "gw3d/mesh.hpp"
#include "gw3d/search.hpp"

namespace gw3d {

using Json = nlohmann::ordered_json;

std::string word_hex(WordId word);
WordId word_from_hex(const std::string& hex);

Json to_json(const Bounds& bounds);
Json to_json(const MeshStats& stats);
MeshStats stats_from_json(const Json& j);

Json to_json(const ModelRecord& record);
ModelRecord record_from_json(const Json& j);

Json to_json(const FreshnessRecord& record);
FreshnessRecord freshness_from_json(const Json& j);

Json to_json(const VersionChain& chain);
Json to_json(const DuplicateMatch& match);
Json to_json(const SearchResult& result);
Json to_json(const std::vector<SearchResult>& results);
Json to_json(const Histogram& histogram);
Json to_json(const GammaFit& fit);
Json to_json(const Filters& filters);

// {"error": {"code": ..., "message": ...}}
Json error_json(ErrorCode code, const std::string& message);

}  // namespace gw3d

#endif  // GW3D_JSON_CODEC_HPP_
