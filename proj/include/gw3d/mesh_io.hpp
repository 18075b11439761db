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

#ifndef GW3D_MESH_IO_HPP_
#define GW3D_MESH_IO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gw3d/mesh.hpp"

namespace gw3d {

enum class MeshFormat { kStlBinary, kStlAscii, kObj, kOther };

std::string_view to_string(MeshFormat format);
MeshFormat mesh_format_from_string(std::string_view name);

struct ParsedMesh {
  TriangleMesh mesh;
  MeshFormat format = MeshFormat::kOther;
};

// STL, ASCII or binary. Stored facet normals are discarded and vertices come
// out unwelded, three per triangle.
TriangleMesh parse_stl(std::span<const std::uint8_t> bytes);
ParsedMesh parse_stl_detect(std::span<const std::uint8_t> bytes);

// Wavefront OBJ subset: `v` and `f` statements; polygons fan-triangulated.
TriangleMesh parse_obj(std::string_view text);

// Picks a parser from the hint ("stl", "obj", or empty to sniff).
ParsedMesh parse_mesh(std::span<const std::uint8_t> bytes, std::string_view hint);

std::vector<std::uint8_t> write_stl_binary(const TriangleMesh& mesh,
                                           std::string_view header = {});
std::string write_stl_ascii(const TriangleMesh& mesh, std::string_view name = "mesh");
std::string write_obj(const TriangleMesh& mesh);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void write_file(const std::string& path, std::string_view text);

}  // namespace gw3d

#endif  // GW3D_MESH_IO_HPP_
