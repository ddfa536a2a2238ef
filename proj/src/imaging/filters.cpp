#include "camikit/imaging/imaging.hpp"

#include "camikit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace camikit::imaging {

ImageVolume threshold(const ImageVolume& v, double low, double high, double inside,
                      double outside) {
  if (!(low <= high))
    throw Error(ErrorCode::BadRange, "low " + std::to_string(low) + " > high " +
                                       std::to_string(high));
  ImageVolume out(v.dims(), v.spacing(), v.origin(), v.voxel_type());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double x = v.value(n);
    out.set(n, (low <= x && x <= high) ? inside : outside);
  }
  return out;
}

ImageVolume box_smooth(const ImageVolume& v, int radius) {
  if (radius < 1)
    throw Error(ErrorCode::InvalidArgument, "radius must be >= 1");
  const Dims d = v.dims();
  std::vector<double> a(v.size()), b(v.size());
  for (std::size_t n = 0; n < v.size(); ++n)
    a[n] = v.value(n);

  const auto r = static_cast<long>(radius);
  const std::size_t stride[3] = {1, d.nx, d.nx * d.ny};
  // one clamped running window per axis; sums only, divide once at the end
  for (int axis = 0; axis < 3; ++axis) {
    const long n = static_cast<long>(d[axis]);
    for (std::size_t k = 0; k < d.nz; ++k)
      for (std::size_t j = 0; j < d.ny; ++j)
        for (std::size_t i = 0; i < d.nx; ++i) {
          const std::size_t pos[3] = {i, j, k};
          const std::size_t base = v.index(i, j, k) - pos[axis] * stride[axis];
          const long c = static_cast<long>(pos[axis]);
          double sum = 0.0;
          for (long t = c - r; t <= c + r; ++t)
            sum += a[base + static_cast<std::size_t>(std::clamp(t, 0L, n - 1)) * stride[axis]];
          b[v.index(i, j, k)] = sum;
        }
    std::swap(a, b);
  }

  const double count = std::pow(2.0 * radius + 1.0, 3);
  ImageVolume out(v.dims(), v.spacing(), v.origin(), v.voxel_type());
  for (std::size_t n = 0; n < v.size(); ++n)
    out.set(n, a[n] / count);
  return out;
}

ImageVolume crop(const ImageVolume& v, const std::array<std::size_t, 3>& lo,
                 const std::array<std::size_t, 3>& hi) {
  static constexpr char kAxis[] = "ijk";
  for (int a = 0; a < 3; ++a)
    if (lo[a] > hi[a])
      throw Error(ErrorCode::EmptyBox, std::string(1, kAxis[a]) + " range " +
                                         std::to_string(lo[a]) + ".." + std::to_string(hi[a]));
  for (int a = 0; a < 3; ++a)
    if (hi[a] >= v.dims()[a])
      throw Error(ErrorCode::OutOfBounds, std::string(1, kAxis[a]) + " index " +
                                            std::to_string(hi[a]) + " >= " +
                                            std::to_string(v.dims()[a]));
  const Dims d{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
  const Vec3 origin = v.position(static_cast<double>(lo[0]), static_cast<double>(lo[1]),
                                 static_cast<double>(lo[2]));
  ImageVolume out(d, v.spacing(), origin, v.voxel_type());
  for (std::size_t k = 0; k < d.nz; ++k)
    for (std::size_t j = 0; j < d.ny; ++j)
      for (std::size_t i = 0; i < d.nx; ++i)
        out.set(out.index(i, j, k), v.at(lo[0] + i, lo[1] + j, lo[2] + k));
  return out;
}

VoxelStats voxel_stats(const ImageVolume& v) {
  VoxelStats s;
  s.count = v.size();
  if (s.count == 0)
    throw Error(ErrorCode::InvalidArgument, "empty volume");
  s.min = s.max = v.value(0);
  double sum = 0.0;
  for (std::size_t n = 0; n < s.count; ++n) {
    const double x = v.value(n);
    if (!std::isfinite(x))
      throw Error(ErrorCode::InvalidArgument, "non-finite voxel at " + std::to_string(n));
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    sum += x;
  }
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (std::size_t n = 0; n < s.count; ++n) {
    const double dx = v.value(n) - s.mean;
    sq += dx * dx;
  }
  s.std = std::sqrt(sq / static_cast<double>(s.count));

  const double range = s.max - s.min;
  for (std::size_t n = 0; n < s.count; ++n) {
    std::size_t bin = 0;
    if (range > 0)
      bin = std::min<std::size_t>(
        255, static_cast<std::size_t>(std::floor((v.value(n) - s.min) / range * 256.0)));
    ++s.histogram[bin];
  }
  return s;
}

} // namespace camikit::imaging
