#pragma once

#include "camikit/formats/image_volume.hpp"

#include <string>
#include <string_view>

namespace camikit::formats {

/// Parses a MetaImage file with an ASCII header and `ElementDataFile = LOCAL`
/// raw voxels. Voxels are little-endian unless the header says otherwise.
/// Two-dimensional images load with nz = 1.
ImageVolume parse_mha(std::string_view bytes);

/// Writes a header in a fixed key order followed by little-endian voxels.
std::string write_mha(const ImageVolume& volume);

} // namespace camikit::formats
