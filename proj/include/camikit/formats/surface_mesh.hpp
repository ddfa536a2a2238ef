#pragma once

#include "camikit/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace camikit {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh, coordinates in millimetres. `normals` is either
/// empty or holds one unit vector per vertex.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec3> normals;

  friend bool operator==(const SurfaceMesh&, const SurfaceMesh&) = default;
};

/// Throws InvalidMesh if an index is out of range, a triangle repeats a
/// vertex, a coordinate is non-finite, or normals are present but not unit.
void validate_mesh(const SurfaceMesh& mesh);

} // namespace camikit
