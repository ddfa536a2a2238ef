#include "camikit/formats/mesh_io.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace camikit::formats {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

// Non-empty lines with '#' comments removed.
std::vector<Line> tokenize_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < text.size()) {
    ++number;
    auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                               : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto tokens = text::split_ws(line);
    if (!tokens.empty())
      lines.push_back(Line{number, std::move(tokens)});
  }
  return lines;
}

Vec3 parse_vertex(const std::vector<std::string_view>& tokens, std::size_t first,
                  std::size_t line) {
  if (tokens.size() < first + 3)
    throw Error(ErrorCode::MalformedRecord, "vertex needs three coordinates", line);
  Vec3 v;
  for (std::size_t a = 0; a < 3; ++a) {
    auto value = text::parse_double(tokens[first + a]);
    if (!value || !std::isfinite(*value))
      throw Error(ErrorCode::MalformedRecord, "bad coordinate '" +
                                                std::string(tokens[first + a]) + "'",
                  line);
    v[a] = *value;
  }
  return v;
}

void fan_triangulate(const std::vector<std::uint32_t>& polygon, std::size_t line,
                     std::vector<Triangle>& out) {
  for (std::size_t c = 1; c + 1 < polygon.size(); ++c) {
    Triangle t{polygon[0], polygon[c], polygon[c + 1]};
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw Error(ErrorCode::MalformedRecord, "face repeats a vertex", line);
    out.push_back(t);
  }
}

std::string vertex_line(std::string_view prefix, const Vec3& v) {
  std::string s(prefix);
  s += text::format_double(v.x);
  s += ' ';
  s += text::format_double(v.y);
  s += ' ';
  s += text::format_double(v.z);
  s += '\n';
  return s;
}

} // namespace

SurfaceMesh parse_off(std::string_view text) {
  auto lines = tokenize_lines(text);
  if (lines.empty() || lines[0].tokens[0] != "OFF")
    throw Error(ErrorCode::BadMagic, "first token must be OFF",
                lines.empty() ? std::optional<std::size_t>{} : lines[0].number);

  std::vector<std::string_view> counts(lines[0].tokens.begin() + 1, lines[0].tokens.end());
  std::size_t cursor = 1;
  std::size_t counts_line = lines[0].number;
  if (counts.empty()) {
    if (cursor >= lines.size())
      throw Error(ErrorCode::CountMismatch, "missing counts line");
    counts = lines[cursor].tokens;
    counts_line = lines[cursor].number;
    ++cursor;
  }
  if (counts.size() < 2 || counts.size() > 3)
    throw Error(ErrorCode::MalformedRecord, "counts line must hold 'V F [E]'", counts_line);
  auto nv = text::parse_int(counts[0]);
  auto nf = text::parse_int(counts[1]);
  if (!nv || !nf || *nv < 0 || *nf < 0 || *nv > 0xFFFFFFFFLL)
    throw Error(ErrorCode::MalformedRecord, "bad vertex/face counts", counts_line);
  if (counts.size() == 3) {
    auto ne = text::parse_int(counts[2]);
    if (!ne || *ne < 0)
      throw Error(ErrorCode::MalformedRecord, "bad edge count", counts_line);
  }

  const auto vertex_count = static_cast<std::size_t>(*nv);
  const auto face_count = static_cast<std::size_t>(*nf);
  const std::size_t available = lines.size() - cursor;
  if (available < vertex_count)
    throw Error(ErrorCode::CountMismatch, "declared " + std::to_string(vertex_count) +
                                            " vertices, found " + std::to_string(available));

  SurfaceMesh mesh;
  mesh.vertices.reserve(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v, ++cursor)
    mesh.vertices.push_back(parse_vertex(lines[cursor].tokens, 0, lines[cursor].number));

  if (lines.size() - cursor < face_count)
    throw Error(ErrorCode::CountMismatch,
                "declared " + std::to_string(face_count) + " faces, found " +
                  std::to_string(lines.size() - cursor));

  std::vector<std::uint32_t> polygon;
  for (std::size_t f = 0; f < face_count; ++f, ++cursor) {
    const auto& line = lines[cursor];
    auto n = text::parse_int(line.tokens[0]);
    if (!n || *n < 3)
      throw Error(ErrorCode::MalformedRecord, "face needs at least 3 corners", line.number);
    if (line.tokens.size() < static_cast<std::size_t>(*n) + 1)
      throw Error(ErrorCode::MalformedRecord, "face lists fewer corners than declared",
                  line.number);
    polygon.clear();
    for (long long c = 0; c < *n; ++c) {
      auto idx = text::parse_int(line.tokens[static_cast<std::size_t>(c) + 1]);
      if (!idx)
        throw Error(ErrorCode::MalformedRecord, "bad vertex index", line.number);
      if (*idx < 0 || static_cast<std::size_t>(*idx) >= vertex_count)
        throw Error(ErrorCode::IndexOutOfRange,
                    "vertex index " + std::to_string(*idx) + " with " +
                      std::to_string(vertex_count) + " vertices",
                    line.number);
      polygon.push_back(static_cast<std::uint32_t>(*idx));
    }
    fan_triangulate(polygon, line.number, mesh.triangles);
  }
  if (cursor != lines.size())
    throw Error(ErrorCode::CountMismatch, "unexpected data after the declared faces",
                lines[cursor].number);
  return mesh;
}

std::string write_off(const SurfaceMesh& mesh) {
  std::string out = "OFF\n";
  out += std::to_string(mesh.vertices.size()) + " " + std::to_string(mesh.triangles.size()) +
         " 0\n";
  for (const auto& v : mesh.vertices)
    out += vertex_line("", v);
  for (const auto& t : mesh.triangles)
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
           std::to_string(t[2]) + "\n";
  return out;
}

SurfaceMesh parse_obj(std::string_view text) {
  SurfaceMesh mesh;
  struct PendingFace {
    std::vector<long long> refs; // resolved 0-based, may be >= count until the end
    std::size_t line;
  };
  std::vector<PendingFace> faces;

  for (const auto& line : tokenize_lines(text)) {
    const auto& tok = line.tokens;
    if (tok[0] == "v") {
      mesh.vertices.push_back(parse_vertex(tok, 1, line.number));
    } else if (tok[0] == "f") {
      if (tok.size() < 4)
        throw Error(ErrorCode::MalformedRecord, "face needs at least 3 corners", line.number);
      PendingFace face{{}, line.number};
      for (std::size_t c = 1; c < tok.size(); ++c) {
        auto ref = tok[c].substr(0, tok[c].find('/'));
        auto idx = text::parse_int(ref);
        if (!idx)
          throw Error(ErrorCode::MalformedRecord,
                      "bad face reference '" + std::string(tok[c]) + "'", line.number);
        long long resolved = 0;
        if (*idx > 0)
          resolved = *idx - 1;
        else if (*idx < 0)
          resolved = static_cast<long long>(mesh.vertices.size()) + *idx;
        else
          throw Error(ErrorCode::IndexOutOfRange, "face reference 0", line.number);
        if (resolved < 0)
          throw Error(ErrorCode::IndexOutOfRange,
                      "face reference " + std::to_string(*idx) + " before first vertex",
                      line.number);
        face.refs.push_back(resolved);
      }
      faces.push_back(std::move(face));
    }
  }

  std::vector<std::uint32_t> polygon;
  for (const auto& face : faces) {
    polygon.clear();
    for (auto r : face.refs) {
      if (static_cast<std::size_t>(r) >= mesh.vertices.size())
        throw Error(ErrorCode::IndexOutOfRange,
                    "face reference " + std::to_string(r + 1) + " with " +
                      std::to_string(mesh.vertices.size()) + " vertices",
                    face.line);
      polygon.push_back(static_cast<std::uint32_t>(r));
    }
    fan_triangulate(polygon, face.line, mesh.triangles);
  }
  return mesh;
}

std::string write_obj(const SurfaceMesh& mesh) {
  std::string out;
  for (const auto& v : mesh.vertices)
    out += vertex_line("v ", v);
  for (const auto& t : mesh.triangles)
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
           std::to_string(t[2] + 1) + "\n";
  return out;
}

} // namespace camikit::formats
