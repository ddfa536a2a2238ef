#include "camikit/imaging/imaging.hpp"

#include "camikit/error.hpp"

#include <cmath>
#include <string>

namespace camikit::imaging {

std::string_view to_string(SliceAxis axis) noexcept {
  switch (axis) {
  case SliceAxis::axial:
    return "axial";
  case SliceAxis::coronal:
    return "coronal";
  case SliceAxis::sagittal:
    return "sagittal";
  }
  return "?";
}

std::optional<SliceAxis> slice_axis_from_string(std::string_view name) noexcept {
  for (auto a : {SliceAxis::axial, SliceAxis::coronal, SliceAxis::sagittal})
    if (to_string(a) == name)
      return a;
  return std::nullopt;
}

Slice2D extract_slice(const ImageVolume& v, SliceAxis axis, std::size_t index) {
  const Dims d = v.dims();
  const Vec3 sp = v.spacing();
  const std::size_t extent = axis == SliceAxis::axial ? d.nz
                             : axis == SliceAxis::coronal ? d.ny
                                                          : d.nx;
  if (index >= extent)
    throw Error(ErrorCode::IndexOutOfRange, std::string(to_string(axis)) + " index " +
                                              std::to_string(index) + " >= " +
                                              std::to_string(extent));
  Slice2D s;
  const double idx = static_cast<double>(index);
  switch (axis) {
  case SliceAxis::axial:
    s.width = d.nx;
    s.height = d.ny;
    s.origin = v.position(0, 0, idx);
    s.axis_u = {sp.x, 0, 0};
    s.axis_v = {0, sp.y, 0};
    break;
  case SliceAxis::coronal:
    s.width = d.nx;
    s.height = d.nz;
    s.origin = v.position(0, idx, 0);
    s.axis_u = {sp.x, 0, 0};
    s.axis_v = {0, 0, sp.z};
    break;
  case SliceAxis::sagittal:
    s.width = d.ny;
    s.height = d.nz;
    s.origin = v.position(idx, 0, 0);
    s.axis_u = {0, sp.y, 0};
    s.axis_v = {0, 0, sp.z};
    break;
  }
  s.pixels = make_buffer(v.voxel_type(), s.width * s.height);
  for (std::size_t y = 0; y < s.height; ++y)
    for (std::size_t x = 0; x < s.width; ++x) {
      std::size_t flat = 0;
      switch (axis) {
      case SliceAxis::axial:
        flat = v.index(x, y, index);
        break;
      case SliceAxis::coronal:
        flat = v.index(x, index, y);
        break;
      case SliceAxis::sagittal:
        flat = v.index(index, x, y);
        break;
      }
      buffer_set(s.pixels, x + s.width * y, v.value(flat));
    }
  return s;
}

double sample_trilinear(const ImageVolume& v, const Vec3& p) noexcept {
  const Vec3 q = p - v.origin();
  const double c[3] = {q.x / v.spacing().x, q.y / v.spacing().y, q.z / v.spacing().z};
  std::size_t i0[3], i1[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    const double hi = static_cast<double>(v.dims()[a] - 1);
    if (!(c[a] >= 0.0 && c[a] <= hi))
      return 0.0;
    const double f = std::floor(c[a]);
    i0[a] = static_cast<std::size_t>(f);
    i1[a] = std::min(i0[a] + 1, v.dims()[a] - 1);
    t[a] = c[a] - f;
  }
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    std::size_t idx[3];
    for (int a = 0; a < 3; ++a) {
      const bool upper = (corner >> a) & 1;
      w *= upper ? t[a] : 1.0 - t[a];
      idx[a] = upper ? i1[a] : i0[a];
    }
    if (w != 0.0)
      acc += w * v.at(idx[0], idx[1], idx[2]);
  }
  return acc;
}

Slice2D oblique_slice(const ImageVolume& v, const Vec3& origin, const Vec3& u, const Vec3& w,
                      std::size_t su, std::size_t sw) {
  if (su == 0 || sw == 0)
    throw Error(ErrorCode::InvalidArgument, "sample counts must be >= 1");
  const double nu = norm(u), nw = norm(w);
  if (!(nu > 0) || !(nw > 0) || !is_finite(u) || !is_finite(w) ||
      norm(cross(u, w)) <= 1e-12 * nu * nw)
    throw Error(ErrorCode::DegeneratePlane, "plane axes are parallel or zero");
  Slice2D s;
  s.width = su;
  s.height = sw;
  s.origin = origin;
  s.axis_u = u;
  s.axis_v = w;
  s.pixels = make_buffer(VoxelType::f32, su * sw);
  for (std::size_t b = 0; b < sw; ++b)
    for (std::size_t a = 0; a < su; ++a) {
      const Vec3 p = origin + static_cast<double>(a) * u + static_cast<double>(b) * w;
      buffer_set(s.pixels, a + su * b, sample_trilinear(v, p));
    }
  return s;
}

ImageVolume slice_to_volume(const Slice2D& s) {
  return ImageVolume(Dims{s.width, s.height, 1}, Vec3{norm(s.axis_u), norm(s.axis_v), 1.0},
                     s.origin, s.pixels);
}

} // namespace camikit::imaging
