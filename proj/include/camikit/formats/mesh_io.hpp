#pragma once

#include "camikit/formats/surface_mesh.hpp"

#include <string>
#include <string_view>

namespace camikit::formats {

/// OFF reader. Polygons with more than three corners are fan-triangulated
/// from their first corner. Extra per-vertex or per-face tokens (colours)
/// are ignored.
SurfaceMesh parse_off(std::string_view text);
std::string write_off(const SurfaceMesh& mesh);

/// OBJ reader limited to `v` and `f` records. Face references are 1-based,
/// may carry `/vt/vn` suffixes, and negative values count back from the
/// most recent vertex.
SurfaceMesh parse_obj(std::string_view text);
std::string write_obj(const SurfaceMesh& mesh);

} // namespace camikit::formats
