#pragma once

#include "camikit/formats/image_volume.hpp"
#include "camikit/formats/surface_mesh.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace camikit::imaging {

/// x -> inside when low <= x <= high, else outside. Throws BadRange.
ImageVolume threshold(const ImageVolume& v, double low, double high, double inside,
                      double outside);

/// Mean over the (2r+1)^3 neighbourhood, clamp-to-edge borders.
ImageVolume box_smooth(const ImageVolume& v, int radius);

/// Inclusive index box. Throws EmptyBox when lo > hi on an axis, OutOfBounds
/// when hi reaches past the volume.
ImageVolume crop(const ImageVolume& v, const std::array<std::size_t, 3>& lo,
                 const std::array<std::size_t, 3>& hi);

struct VoxelStats {
  double min = 0;
  double max = 0;
  double mean = 0;
  double std = 0; // population
  std::size_t count = 0;
  std::array<std::uint64_t, 256> histogram{};
};

VoxelStats voxel_stats(const ImageVolume& v);

enum class SliceAxis { axial, coronal, sagittal };

std::string_view to_string(SliceAxis axis) noexcept;
std::optional<SliceAxis> slice_axis_from_string(std::string_view name) noexcept;

/// Row-major w x h pixels; pixel (x, y) sits at origin + x*axis_u + y*axis_v.
struct Slice2D {
  std::size_t width = 0;
  std::size_t height = 0;
  VoxelBuffer pixels;
  Vec3 origin;
  Vec3 axis_u;
  Vec3 axis_v;

  double pixel(std::size_t x, std::size_t y) const noexcept {
    return buffer_value(pixels, x + width * y);
  }
};

/// axial fixes k (w=nx, h=ny), coronal fixes j (w=nx, h=nz), sagittal
/// fixes i (w=ny, h=nz). Throws IndexOutOfRange.
Slice2D extract_slice(const ImageVolume& v, SliceAxis axis, std::size_t index);

/// Trilinear sample at a physical point; 0 outside the voxel-centre lattice.
double sample_trilinear(const ImageVolume& v, const Vec3& p) noexcept;

/// f32 slice sampled at origin + a*u + b*w for a < su, b < sw.
/// Throws DegeneratePlane when u and w are parallel or zero.
Slice2D oblique_slice(const ImageVolume& v, const Vec3& origin, const Vec3& u, const Vec3& w,
                      std::size_t su, std::size_t sw);

/// A slice stored as a w x h x 1 volume; spacing is the axis lengths.
ImageVolume slice_to_volume(const Slice2D& s);

/// Marching cubes over the voxel lattice, padded with one layer of -inf.
/// Triangles wind so their normals point down the field gradient.
SurfaceMesh isosurface(const ImageVolume& v, double isovalue);

/// One cube with corners in Bourke order at unit positions, no padding.
/// Vertices are shared per cube edge.
SurfaceMesh polygonise_cell(const std::array<double, 8>& values, double isovalue);

} // namespace camikit::imaging
