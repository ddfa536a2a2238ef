#include "camikit/mesh/mesh_ops.hpp"

#include "camikit/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace camikit::mesh {

Mat3 Affine4::linear() const noexcept {
  return {{{m[0][0], m[0][1], m[0][2]}, {m[1][0], m[1][1], m[1][2]}, {m[2][0], m[2][1], m[2][2]}}};
}

Vec3 Affine4::apply(const Vec3& p) const noexcept {
  return mul(linear(), p) + translation();
}

Affine4 Affine4::translate(const Vec3& t) noexcept {
  Affine4 a;
  a.m[0][3] = t.x;
  a.m[1][3] = t.y;
  a.m[2][3] = t.z;
  return a;
}

Affine4 Affine4::scale(const Vec3& s) noexcept {
  Affine4 a;
  a.m[0][0] = s.x;
  a.m[1][1] = s.y;
  a.m[2][2] = s.z;
  return a;
}

Affine4 Affine4::from_linear(const Mat3& l, const Vec3& t) noexcept {
  Affine4 a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      a.m[r][c] = l[r][c];
  a.m[0][3] = t.x;
  a.m[1][3] = t.y;
  a.m[2][3] = t.z;
  return a;
}

Affine4 Affine4::rotate_xyz_deg(const Vec3& angles) noexcept {
  const double k = std::numbers::pi / 180.0;
  const double cx = std::cos(angles.x * k), sx = std::sin(angles.x * k);
  const double cy = std::cos(angles.y * k), sy = std::sin(angles.y * k);
  const double cz = std::cos(angles.z * k), sz = std::sin(angles.z * k);
  const Mat3 rx{{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
  const Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
  const Mat3 rz{{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
  return from_linear(rz, {}) * from_linear(ry, {}) * from_linear(rx, {});
}

Affine4 operator*(const Affine4& a, const Affine4& b) noexcept {
  Affine4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0;
      for (int k = 0; k < 4; ++k)
        s += a.m[i][k] * b.m[k][j];
      r.m[i][j] = s;
    }
  return r;
}

SurfaceMesh transform_mesh(const SurfaceMesh& m, const Affine4& t) {
  for (const auto& row : t.m)
    for (double x : row)
      if (!std::isfinite(x))
        throw Error(ErrorCode::InvalidArgument, "transform has non-finite entries");
  if (t.m[3] != std::array<double, 4>{0, 0, 0, 1})
    throw Error(ErrorCode::InvalidArgument, "transform last row must be 0 0 0 1");
  if (t.m == Affine4::identity().m)
    return m;

  SurfaceMesh out;
  out.triangles = m.triangles;
  out.vertices.reserve(m.vertices.size());
  for (const auto& p : m.vertices)
    out.vertices.push_back(t.apply(p));
  if (!m.normals.empty()) {
    const Mat3 a = t.linear();
    const double det = determinant(a);
    if (det == 0.0 || !std::isfinite(det))
      throw Error(ErrorCode::SingularTransform, "linear block is not invertible");
    const Mat3 nt = transpose(inverse(a, det));
    out.normals.reserve(m.normals.size());
    for (const auto& n : m.normals) {
      const Vec3 q = mul(nt, n);
      out.normals.push_back(q / norm(q));
    }
  }
  return out;
}

double surface_area(const SurfaceMesh& m) noexcept {
  double area = 0.0;
  for (const auto& t : m.triangles) {
    const Vec3& a = m.vertices[t[0]];
    area += 0.5 * norm(cross(m.vertices[t[1]] - a, m.vertices[t[2]] - a));
  }
  return area;
}

namespace {

std::map<Edge, int> edge_counts(const SurfaceMesh& m) {
  std::map<Edge, int> counts;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3];
      ++counts[{std::min(a, b), std::max(a, b)}];
    }
  return counts;
}

} // namespace

std::vector<Edge> boundary_edges(const SurfaceMesh& m) {
  std::vector<Edge> out;
  for (const auto& [edge, count] : edge_counts(m))
    if (count != 2)
      out.push_back(edge);
  return out;
}

double signed_volume(const SurfaceMesh& m) noexcept {
  double v = 0.0;
  for (const auto& t : m.triangles)
    v += dot(m.vertices[t[0]], cross(m.vertices[t[1]], m.vertices[t[2]]));
  return v / 6.0;
}

double enclosed_volume(const SurfaceMesh& m) {
  const auto open = boundary_edges(m);
  if (!open.empty()) {
    std::string detail = std::to_string(open.size()) + " boundary edge(s):";
    for (std::size_t i = 0; i < open.size() && i < 10; ++i)
      detail += " (" + std::to_string(open[i].first) + "," + std::to_string(open[i].second) + ")";
    throw Error(ErrorCode::NotClosed, detail);
  }
  return std::abs(signed_volume(m));
}

std::int64_t euler_characteristic(const SurfaceMesh& m) {
  return static_cast<std::int64_t>(m.vertices.size()) -
         static_cast<std::int64_t>(edge_counts(m).size()) +
         static_cast<std::int64_t>(m.triangles.size());
}

NormalsResult compute_normals(const SurfaceMesh& m) {
  NormalsResult r;
  r.mesh.vertices = m.vertices;
  r.mesh.triangles = m.triangles;
  std::vector<Vec3> acc(m.vertices.size());
  for (const auto& t : m.triangles) {
    const Vec3& a = m.vertices[t[0]];
    // |cross| is twice the area, so this is area weighting
    const Vec3 n = cross(m.vertices[t[1]] - a, m.vertices[t[2]] - a);
    for (auto v : t)
      acc[v] += n;
  }
  r.mesh.normals.reserve(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = norm(acc[i]);
    if (len > 0.0 && std::isfinite(len)) {
      r.mesh.normals.push_back(acc[i] / len);
    } else {
      r.mesh.normals.push_back({0, 0, 1});
      r.fallback_vertices.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return r;
}

SurfaceMesh laplacian_smooth(const SurfaceMesh& m, int iterations, double lambda) {
  if (iterations < 0)
    throw Error(ErrorCode::InvalidArgument, "iterations must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
  if (iterations == 0 || lambda == 0.0)
    return m;

  std::vector<std::vector<std::uint32_t>> ring(m.vertices.size());
  for (const auto& [edge, count] : edge_counts(m)) {
    ring[edge.first].push_back(edge.second);
    ring[edge.second].push_back(edge.first);
  }
  for (auto& r : ring)
    std::sort(r.begin(), r.end());

  std::vector<Vec3> cur = m.vertices, next(cur.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (ring[i].empty()) {
        next[i] = cur[i];
        continue;
      }
      Vec3 avg{};
      for (auto n : ring[i])
        avg += cur[n];
      avg = avg / static_cast<double>(ring[i].size());
      next[i] = cur[i] + lambda * (avg - cur[i]);
    }
    std::swap(cur, next);
  }

  SurfaceMesh out;
  out.vertices = std::move(cur);
  out.triangles = m.triangles;
  if (!m.normals.empty())
    out.normals = compute_normals(out).mesh.normals;
  return out;
}

} // namespace camikit::mesh
