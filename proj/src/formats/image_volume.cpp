#include "camikit/formats/image_volume.hpp"

#include "camikit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace camikit {

std::string_view to_string(VoxelType type) noexcept {
  switch (type) {
  case VoxelType::u8: return "u8";
  case VoxelType::i16: return "i16";
  case VoxelType::f32: return "f32";
  }
  return "?";
}

double clamp_to_type(VoxelType type, double value) noexcept {
  switch (type) {
  case VoxelType::u8:
    if (std::isnan(value))
      return 0.0;
    return std::clamp(std::round(value), 0.0, 255.0);
  case VoxelType::i16:
    if (std::isnan(value))
      return 0.0;
    return std::clamp(std::round(value), -32768.0, 32767.0);
  case VoxelType::f32: {
    constexpr double hi = std::numeric_limits<float>::max();
    if (std::isnan(value))
      return value;
    return static_cast<double>(static_cast<float>(std::clamp(value, -hi, hi)));
  }
  }
  return value;
}

VoxelBuffer make_buffer(VoxelType type, std::size_t count) {
  switch (type) {
  case VoxelType::u8: return std::vector<std::uint8_t>(count, 0);
  case VoxelType::i16: return std::vector<std::int16_t>(count, 0);
  case VoxelType::f32: return std::vector<float>(count, 0.0F);
  }
  return {};
}

std::size_t buffer_length(const VoxelBuffer& buffer) noexcept {
  return std::visit([](const auto& v) { return v.size(); }, buffer);
}

VoxelType buffer_type(const VoxelBuffer& buffer) noexcept {
  return static_cast<VoxelType>(buffer.index());
}

double buffer_value(const VoxelBuffer& buffer, std::size_t flat) noexcept {
  return std::visit([flat](const auto& v) { return static_cast<double>(v[flat]); },
                    buffer);
}

void buffer_set(VoxelBuffer& buffer, std::size_t flat, double v) noexcept {
  const double c = clamp_to_type(buffer_type(buffer), v);
  std::visit(
    [flat, c](auto& data) {
      using T = typename std::decay_t<decltype(data)>::value_type;
      data[flat] = static_cast<T>(c);
    },
    buffer);
}

namespace {

void check_geometry(const Dims& dims, const Vec3& spacing, const Vec3& origin) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0)
    throw Error(ErrorCode::InvalidArgument, "volume dims must be positive");
  if (!(spacing.x > 0) || !(spacing.y > 0) || !(spacing.z > 0) ||
      !is_finite(spacing))
    throw Error(ErrorCode::InvalidArgument, "volume spacing must be positive");
  if (!is_finite(origin))
    throw Error(ErrorCode::InvalidArgument, "volume origin must be finite");
}

} // namespace

ImageVolume::ImageVolume(Dims dims, Vec3 spacing, Vec3 origin, VoxelType type)
  : dims_(dims), spacing_(spacing), origin_(origin) {
  check_geometry(dims, spacing, origin);
  data_ = make_buffer(type, dims.count());
}

ImageVolume::ImageVolume(Dims dims, Vec3 spacing, Vec3 origin, VoxelBuffer data)
  : dims_(dims), spacing_(spacing), origin_(origin), data_(std::move(data)) {
  check_geometry(dims, spacing, origin);
  if (buffer_length(data_) != dims.count())
    throw Error(ErrorCode::InvalidArgument,
                "voxel buffer length " + std::to_string(buffer_length(data_)) +
                  " does not match dims " + std::to_string(dims.count()));
}

VoxelType ImageVolume::voxel_type() const noexcept { return buffer_type(data_); }

double ImageVolume::value(std::size_t flat) const noexcept {
  return buffer_value(data_, flat);
}

void ImageVolume::set(std::size_t flat, double v) noexcept { buffer_set(data_, flat, v); }

} // namespace camikit
