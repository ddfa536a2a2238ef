#pragma once

// Independent reference computations for the test suites. None of these
// call into the library code they are checking.

#include "camikit/formats/image_volume.hpp"
#include "camikit/formats/surface_mesh.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

using camikit::ImageVolume;
using camikit::SurfaceMesh;
using camikit::Vec3;

struct RawVolume {
  std::size_t nx = 0, ny = 0, nz = 0;
  std::array<double, 3> spacing{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  std::string element_type;
  std::vector<double> values;
};

/// Minimal MetaImage reader: header lines until ElementDataFile, then raw
/// little-endian samples.
RawVolume read_metaimage(std::string_view bytes);

std::vector<double> box_mean(const ImageVolume& v, int r);

struct Stats {
  double min, max, mean, std;
  std::array<std::uint64_t, 256> hist;
};
Stats two_pass_stats(const std::vector<double>& xs);

/// Edge-level facts about one marching-cubes case.
struct CellCheck {
  bool uses_only_crossing_edges = true;
  bool uses_every_crossing_edge = true;
  bool interior_edges_paired = true;
  std::string problem;
};
/// Checks the triangles for a case (as cube-edge triples) against the
/// crossing edges implied by the corner mask.
CellCheck check_cell_case(int mask, const std::vector<std::array<int, 3>>& tris);

/// Per-face boundary segment sets, keyed by face, each as a sorted list of
/// sorted cube-edge pairs.
std::array<std::vector<std::pair<int, int>>, 6>
face_segments(const std::vector<std::array<int, 3>>& tris);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);
/// Distance by projecting onto the plane if the foot lies inside, else the
/// closest edge.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double rms_direct(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Argmin of the sum of squared height residuals over a geometric E grid.
double dense_grid_minimizer(const std::vector<double>& pressures_kpa,
                            const std::vector<double>& heights_mm, double a_mm, double phi,
                            double e_lo_kpa, double e_hi_kpa, std::size_t points);

std::vector<std::uint8_t> window_level(const std::vector<double>& xs, double window,
                                       double level);

struct DecodedPng {
  std::uint32_t width = 0, height = 0;
  int bit_depth = 0, color_type = -1;
  std::vector<std::uint8_t> pixels;
};
DecodedPng decode_png(const std::string& bytes);

} // namespace oracle
