#pragma once

#include "camikit/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace camikit {

enum class VoxelType : std::uint8_t { u8, i16, f32 };

std::string_view to_string(VoxelType type) noexcept;

/// Voxel storage, x fastest then y then z.
using VoxelBuffer = std::variant<std::vector<std::uint8_t>,
                                 std::vector<std::int16_t>,
                                 std::vector<float>>;

/// Rounds half away from zero for integer types and saturates to the type's
/// range. NaN maps to 0 for integer types.
double clamp_to_type(VoxelType type, double value) noexcept;

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t count() const noexcept { return nx * ny * nz; }
  std::size_t operator[](std::size_t axis) const noexcept {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Regular 3D scalar grid. Spacing and origin are in millimetres.
class ImageVolume {
public:
  ImageVolume() = default;

  /// Zero-filled volume. Throws InvalidArgument on empty dims or
  /// non-positive spacing.
  ImageVolume(Dims dims, Vec3 spacing, Vec3 origin, VoxelType type);

  /// Takes ownership of `data`; its length must equal dims.count().
  ImageVolume(Dims dims, Vec3 spacing, Vec3 origin, VoxelBuffer data);

  const Dims& dims() const noexcept { return dims_; }
  const Vec3& spacing() const noexcept { return spacing_; }
  const Vec3& origin() const noexcept { return origin_; }
  VoxelType voxel_type() const noexcept;
  std::size_t size() const noexcept { return dims_.count(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + dims_.nx * (j + dims_.ny * k);
  }

  double value(std::size_t flat) const noexcept;
  double at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return value(index(i, j, k));
  }

  /// Stores `v` after clamp_to_type.
  void set(std::size_t flat, double v) noexcept;

  const VoxelBuffer& buffer() const noexcept { return data_; }

  /// Physical position of voxel centre (i, j, k).
  Vec3 position(double i, double j, double k) const noexcept {
    return {origin_.x + i * spacing_.x, origin_.y + j * spacing_.y,
            origin_.z + k * spacing_.z};
  }

  friend bool operator==(const ImageVolume&, const ImageVolume&) = default;

private:
  Dims dims_{};
  Vec3 spacing_{1.0, 1.0, 1.0};
  Vec3 origin_{};
  VoxelBuffer data_{};
};

VoxelBuffer make_buffer(VoxelType type, std::size_t count);
std::size_t buffer_length(const VoxelBuffer& buffer) noexcept;
VoxelType buffer_type(const VoxelBuffer& buffer) noexcept;
double buffer_value(const VoxelBuffer& buffer, std::size_t flat) noexcept;
void buffer_set(VoxelBuffer& buffer, std::size_t flat, double v) noexcept;

} // namespace camikit
