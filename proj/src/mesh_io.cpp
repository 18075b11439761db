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

#include "gw3d/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gw3d/error.hpp"

namespace gw3d {

namespace {

constexpr std::size_t kStlHeaderBytes = 80;
constexpr std::size_t kStlPreambleBytes = 84;
constexpr std::size_t kStlRecordBytes = 50;

std::uint32_t load_u32_le(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

float load_f32_le(const std::uint8_t* p) {
  return std::bit_cast<float>(load_u32_le(p));
}

void store_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void store_f32_le(std::vector<std::uint8_t>& out, float f) {
  store_u32_le(out, std::bit_cast<std::uint32_t>(f));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Looks for "unit=mm" / "units: mm" style annotations in free text.
std::optional<std::string> find_unit_hint(std::string_view text) {
  const std::string lower = lowercase(text);
  for (std::string_view key : {"units", "unit"}) {
    auto pos = lower.find(key);
    if (pos == std::string::npos) continue;
    pos += key.size();
    while (pos < lower.size() && (lower[pos] == ' ' || lower[pos] == '=' || lower[pos] == ':'))
      ++pos;
    std::size_t end = pos;
    while (end < lower.size() && std::isalpha(static_cast<unsigned char>(lower[end]))) ++end;
    if (end > pos) return lower.substr(pos, end - pos);
  }
  return std::nullopt;
}

bool has_solid_prefix(std::span<const std::uint8_t> bytes) {
  static constexpr char kSolid[] = "solid";
  return bytes.size() >= 5 && std::memcmp(bytes.data(), kSolid, 5) == 0;
}

TriangleMesh parse_stl_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kStlPreambleBytes) {
    throw ParseError("binary STL truncated in header", bytes.size(), ParseError::Unit::kByte);
  }
  const std::uint64_t count = load_u32_le(bytes.data() + kStlHeaderBytes);
  const std::uint64_t expected = kStlPreambleBytes + count * kStlRecordBytes;
  if (bytes.size() < expected) {
    const std::size_t whole = (bytes.size() - kStlPreambleBytes) / kStlRecordBytes;
    throw ParseError("truncated at record " + std::to_string(whole),
                     kStlPreambleBytes + whole * kStlRecordBytes, ParseError::Unit::kByte);
  }
  if (bytes.size() > expected) {
    throw ParseError("trailing bytes after " + std::to_string(count) + " records", expected,
                     ParseError::Unit::kByte);
  }

  TriangleMesh mesh;
  const std::string header(reinterpret_cast<const char*>(bytes.data()), kStlHeaderBytes);
  mesh.unit_hint = find_unit_hint(header.c_str());
  mesh.vertices.reserve(count * 3);
  mesh.triangles.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    const std::uint8_t* rec = bytes.data() + kStlPreambleBytes + r * kStlRecordBytes;
    // rec[0..12) is the stored normal, ignored.
    for (int v = 0; v < 3; ++v) {
      const std::uint8_t* p = rec + 12 + 12 * v;
      Vec3 point{load_f32_le(p), load_f32_le(p + 4), load_f32_le(p + 8)};
      if (!is_finite(point)) {
        throw ParseError("non-finite coordinate in record " + std::to_string(r),
                         static_cast<std::size_t>(p - bytes.data()), ParseError::Unit::kByte);
      }
      mesh.vertices.push_back(point);
    }
    const auto base = static_cast<std::uint32_t>(3 * r);
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  return mesh;
}

// Whitespace tokenizer that tracks line numbers.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  bool next(std::string_view& token) {
    skip_space();
    if (pos_ >= text_.size()) return false;
    token_line_ = line_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    token = text_.substr(start, pos_ - start);
    return true;
  }

  std::string_view rest_of_line() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::size_t line() const { return token_line_; }
  std::size_t current_line() const { return line_; }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t token_line_ = 1;
};

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

TriangleMesh parse_stl_ascii(std::string_view text) {
  Tokenizer tok(text);
  TriangleMesh mesh;
  std::string_view t;

  auto fail = [&](const std::string& what) -> void {
    throw ParseError(what, tok.line(), ParseError::Unit::kLine);
  };
  auto expect = [&](std::string_view word) {
    if (!tok.next(t)) throw ParseError("unexpected end of file, expected '" + std::string(word) + "'",
                                       tok.current_line(), ParseError::Unit::kLine);
    if (t != word) fail("expected '" + std::string(word) + "', found '" + std::string(t) + "'");
  };
  auto number = [&](bool require_finite) {
    if (!tok.next(t)) throw ParseError("unexpected end of file, expected number",
                                       tok.current_line(), ParseError::Unit::kLine);
    double v = 0.0;
    if (!parse_double(t, v)) fail("malformed number '" + std::string(t) + "'");
    if (require_finite && !std::isfinite(v)) fail("non-finite coordinate");
    return v;
  };

  expect("solid");
  mesh.unit_hint = find_unit_hint(tok.rest_of_line());
  while (true) {
    if (!tok.next(t)) throw ParseError("unexpected end of file, expected 'endsolid'",
                                       tok.current_line(), ParseError::Unit::kLine);
    if (t == "endsolid") {
      tok.rest_of_line();
      if (!tok.next(t)) break;
      if (t != "solid") fail("unexpected token after endsolid '" + std::string(t) + "'");
      tok.rest_of_line();
      continue;
    }
    if (t != "facet") fail("expected 'facet', found '" + std::string(t) + "'");
    expect("normal");
    for (int i = 0; i < 3; ++i) number(false);
    expect("outer");
    expect("loop");
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    for (int v = 0; v < 3; ++v) {
      expect("vertex");
      const double x = number(true);
      const double y = number(true);
      const double z = number(true);
      mesh.vertices.push_back({x, y, z});
    }
    expect("endloop");
    expect("endfacet");
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  return mesh;
}

}  // namespace

std::string_view to_string(MeshFormat format) {
  switch (format) {
    case MeshFormat::kStlBinary: return "stl-binary";
    case MeshFormat::kStlAscii: return "stl-ascii";
    case MeshFormat::kObj: return "obj";
    case MeshFormat::kOther: return "other";
  }
  return "other";
}

MeshFormat mesh_format_from_string(std::string_view name) {
  if (name == "stl-binary") return MeshFormat::kStlBinary;
  if (name == "stl-ascii") return MeshFormat::kStlAscii;
  if (name == "obj") return MeshFormat::kObj;
  return MeshFormat::kOther;
}

ParsedMesh parse_stl_detect(std::span<const std::uint8_t> bytes) {
  if (has_solid_prefix(bytes)) {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    try {
      return {parse_stl_ascii(text), MeshFormat::kStlAscii};
    } catch (const ParseError&) {
      // Plenty of binary files start their header with "solid".
      if (bytes.size() >= kStlPreambleBytes) {
        const std::uint64_t count = load_u32_le(bytes.data() + kStlHeaderBytes);
        if (bytes.size() == kStlPreambleBytes + count * kStlRecordBytes) {
          return {parse_stl_binary(bytes), MeshFormat::kStlBinary};
        }
      }
      throw;
    }
  }
  return {parse_stl_binary(bytes), MeshFormat::kStlBinary};
}

TriangleMesh parse_stl(std::span<const std::uint8_t> bytes) {
  return parse_stl_detect(bytes).mesh;
}

TriangleMesh parse_obj(std::string_view text) {
  TriangleMesh mesh;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::uint32_t> face;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    Tokenizer tok(line);
    std::string_view keyword;
    if (!tok.next(keyword)) continue;
    auto fail = [&](const std::string& what) {
      throw ParseError(what, line_no, ParseError::Unit::kLine);
    };

    if (keyword == "v") {
      double c[3];
      for (double& v : c) {
        std::string_view t;
        if (!tok.next(t) || !parse_double(t, v)) fail("malformed vertex");
        if (!std::isfinite(v)) fail("non-finite coordinate");
      }
      mesh.vertices.push_back({c[0], c[1], c[2]});
    } else if (keyword == "f") {
      face.clear();
      std::string_view t;
      while (tok.next(t)) {
        const std::string_view index_text = t.substr(0, t.find('/'));
        long long idx = 0;
        auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), idx);
        if (ec != std::errc() || ptr != index_text.data() + index_text.size() || idx == 0) {
          fail("malformed face index '" + std::string(t) + "'");
        }
        const auto count = static_cast<long long>(mesh.vertices.size());
        const long long resolved = idx > 0 ? idx - 1 : count + idx;
        if (resolved < 0 || resolved >= count) {
          fail("face index " + std::to_string(idx) + " out of range");
        }
        face.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (face.size() < 3) fail("face with fewer than 3 vertices");
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        mesh.triangles.push_back({face[0], face[i], face[i + 1]});
      }
    }
    // vt, vn, usemtl, g, o, s and anything unknown are ignored.
    if (end == text.size()) break;
  }
  return mesh;
}

ParsedMesh parse_mesh(std::span<const std::uint8_t> bytes, std::string_view hint) {
  const std::string h = lowercase(hint);
  if (h == "obj") {
    return {parse_obj({reinterpret_cast<const char*>(bytes.data()), bytes.size()}), MeshFormat::kObj};
  }
  if (h.empty() || h == "auto") {
    // OBJ has no magic; treat text that is not an STL solid but has v/f
    // statements as OBJ.
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                                std::min<std::size_t>(bytes.size(), 4096));
    if (!has_solid_prefix(bytes) && (text.starts_with("v ") || text.find("\nv ") != std::string_view::npos)) {
      return {parse_obj({reinterpret_cast<const char*>(bytes.data()), bytes.size()}), MeshFormat::kObj};
    }
  }
  return parse_stl_detect(bytes);
}

std::vector<std::uint8_t> write_stl_binary(const TriangleMesh& mesh, std::string_view header) {
  std::vector<std::uint8_t> out(kStlHeaderBytes, 0);
  std::copy_n(header.begin(), std::min(header.size(), kStlHeaderBytes), out.begin());
  out.reserve(kStlPreambleBytes + mesh.triangles.size() * kStlRecordBytes);
  store_u32_le(out, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const Triangle& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len > 0.0) n = (1.0 / len) * n;
    for (Vec3 p : {n, a, b, c}) {
      store_f32_le(out, static_cast<float>(p.x));
      store_f32_le(out, static_cast<float>(p.y));
      store_f32_le(out, static_cast<float>(p.z));
    }
    out.push_back(0);
    out.push_back(0);
  }
  return out;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

std::string write_stl_ascii(const TriangleMesh& mesh, std::string_view name) {
  std::string out = "solid " + std::string(name) + "\n";
  for (const Triangle& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len > 0.0) n = (1.0 / len) * n;
    out += "  facet normal ";
    append_number(out, n.x); out += ' ';
    append_number(out, n.y); out += ' ';
    append_number(out, n.z);
    out += "\n    outer loop\n";
    for (Vec3 p : {a, b, c}) {
      out += "      vertex ";
      append_number(out, p.x); out += ' ';
      append_number(out, p.y); out += ' ';
      append_number(out, p.z); out += '\n';
    }
    out += "    endloop\n  endfacet\n";
  }
  out += "endsolid " + std::string(name) + "\n";
  return out;
}

std::string write_obj(const TriangleMesh& mesh) {
  std::string out;
  for (const Vec3& v : mesh.vertices) {
    out += "v ";
    append_number(out, v.x); out += ' ';
    append_number(out, v.y); out += ' ';
    append_number(out, v.z); out += '\n';
  }
  for (const Triangle& t : mesh.triangles) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' +
           std::to_string(t[2] + 1) + '\n';
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kStorage, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kStorage, "short write to '" + path + "'");
}

void write_file(const std::string& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace gw3d
