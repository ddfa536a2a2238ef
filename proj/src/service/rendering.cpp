#include "camikit/service/service.hpp"

#include "camikit/error.hpp"
#include "camikit/imaging/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace camikit::service {

int default_port() {
  if (const char* env = std::getenv("CAMIKIT_PORT")) {
    char* end = nullptr;
    const long p = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && p > 0 && p < 65536)
      return static_cast<int>(p);
  }
  return kDefaultPort;
}

std::uint8_t window_level(double x, double window, double level) noexcept {
  if (!(window > 0))
    return x >= level ? 255 : 0;
  const double t = std::clamp((x - (level - window / 2)) / window, 0.0, 1.0);
  if (std::isnan(t))
    return 0;
  return static_cast<std::uint8_t>(std::round(t * 255.0)); // std::round: half away from zero
}

std::vector<std::uint8_t> slice_pixels(const ImageVolume& volume, const imaging::Slice2D& slice,
                                       std::optional<double> window, std::optional<double> level) {
  if (!window || !level) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < volume.size(); ++i) {
      const double v = volume.value(i);
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!(lo <= hi))
      lo = hi = 0;
    if (!window)
      window = hi - lo;
    if (!level)
      level = (hi + lo) / 2;
  }
  std::vector<std::uint8_t> out(slice.width * slice.height);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = window_level(buffer_value(slice.pixels, i), *window, *level);
  return out;
}

std::string encode_png(std::size_t width, std::size_t height,
                       const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != width * height || width == 0 || height == 0)
    throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match the image size");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr))
    throw Error(ErrorCode::IoFailure, std::string("png: ") + image.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr))
    throw Error(ErrorCode::IoFailure, std::string("png: ") + image.message);
  out.resize(size);
  return out;
}

} // namespace camikit::service
