#pragma once

#include "camikit/formats/surface_mesh.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace camikit::mesh {

/// 4x4 affine transform; the last row is fixed at (0, 0, 0, 1).
struct Affine4 {
  std::array<std::array<double, 4>, 4> m{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};

  Mat3 linear() const noexcept;
  Vec3 translation() const noexcept { return {m[0][3], m[1][3], m[2][3]}; }
  Vec3 apply(const Vec3& p) const noexcept;

  static Affine4 identity() noexcept { return {}; }
  static Affine4 translate(const Vec3& t) noexcept;
  static Affine4 scale(const Vec3& s) noexcept;
  /// Rotations about x, then y, then z, in degrees.
  static Affine4 rotate_xyz_deg(const Vec3& angles) noexcept;
  static Affine4 from_linear(const Mat3& a, const Vec3& t) noexcept;
  friend Affine4 operator*(const Affine4& a, const Affine4& b) noexcept;
};

/// Throws InvalidArgument if the last row is not exactly (0,0,0,1) or an
/// entry is non-finite; SingularTransform if normals are present and the
/// linear block cannot be inverted.
SurfaceMesh transform_mesh(const SurfaceMesh& m, const Affine4& t);

double surface_area(const SurfaceMesh& m) noexcept;

using Edge = std::pair<std::uint32_t, std::uint32_t>; // (lo, hi)

/// Undirected edges whose triangle count is not exactly two, ascending.
std::vector<Edge> boundary_edges(const SurfaceMesh& m);

/// Throws NotClosed listing up to ten boundary edges.
double enclosed_volume(const SurfaceMesh& m);

/// Signed sum without the closedness check or absolute value.
double signed_volume(const SurfaceMesh& m) noexcept;

std::int64_t euler_characteristic(const SurfaceMesh& m);

struct NormalsResult {
  SurfaceMesh mesh;
  std::vector<std::uint32_t> fallback_vertices; // given (0, 0, 1)
};

NormalsResult compute_normals(const SurfaceMesh& m);

/// Uniform Laplacian, all vertices updated from the previous iterate.
/// Throws InvalidArgument on iterations < 0 or lambda outside [0, 1].
SurfaceMesh laplacian_smooth(const SurfaceMesh& m, int iterations, double lambda);

} // namespace camikit::mesh
