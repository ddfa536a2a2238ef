#include "camikit/formats/surface_mesh.hpp"

#include "camikit/error.hpp"

#include <cmath>
#include <string>

namespace camikit {

void validate_mesh(const SurfaceMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t v = 0; v < n; ++v)
    if (!is_finite(mesh.vertices[v]))
      throw Error(ErrorCode::InvalidMesh, "vertex " + std::to_string(v) + " is not finite");
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (auto idx : tri)
      if (idx >= n)
        throw Error(ErrorCode::InvalidMesh, "triangle " + std::to_string(t) +
                                              " references vertex " + std::to_string(idx));
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw Error(ErrorCode::InvalidMesh,
                  "triangle " + std::to_string(t) + " repeats a vertex");
  }
  if (!mesh.normals.empty()) {
    if (mesh.normals.size() != n)
      throw Error(ErrorCode::InvalidMesh, "normal count differs from vertex count");
    for (std::size_t v = 0; v < n; ++v)
      if (std::abs(norm(mesh.normals[v]) - 1.0) > 1e-6)
        throw Error(ErrorCode::InvalidMesh, "normal " + std::to_string(v) + " is not unit length");
  }
}

} // namespace camikit
