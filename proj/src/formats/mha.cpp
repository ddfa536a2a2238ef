#include "camikit/formats/mha.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>

namespace camikit::formats {

namespace {

struct HeaderEntry {
  std::string value;
  std::size_t line;
};

constexpr std::size_t kMaxDim = std::size_t{1} << 24;

std::string_view element_type_name(VoxelType type) {
  switch (type) {
  case VoxelType::u8: return "MET_UCHAR";
  case VoxelType::i16: return "MET_SHORT";
  case VoxelType::f32: return "MET_FLOAT";
  }
  return "";
}

std::size_t element_size(VoxelType type) {
  switch (type) {
  case VoxelType::u8: return 1;
  case VoxelType::i16: return 2;
  case VoxelType::f32: return 4;
  }
  return 1;
}

const HeaderEntry* find_key(const std::map<std::string, HeaderEntry>& header,
                            std::initializer_list<std::string_view> names) {
  for (auto name : names) {
    auto it = header.find(std::string(name));
    if (it != header.end())
      return &it->second;
  }
  return nullptr;
}

const HeaderEntry& require_key(const std::map<std::string, HeaderEntry>& header,
                               std::string_view name) {
  const auto* entry = find_key(header, {name});
  if (!entry)
    throw Error(ErrorCode::MissingKey, std::string(name));
  return *entry;
}

bool parse_bool(const HeaderEntry& entry, std::string_view key) {
  auto v = text::to_lower(text::trim(entry.value));
  if (v == "true")
    return true;
  if (v == "false")
    return false;
  throw Error(ErrorCode::MalformedHeader,
              std::string(key) + " must be True or False", entry.line);
}

std::vector<double> parse_reals(const HeaderEntry& entry, std::string_view key,
                                std::size_t count) {
  auto tokens = text::split_ws(entry.value);
  if (tokens.size() != count)
    throw Error(ErrorCode::MalformedHeader,
                std::string(key) + " expects " + std::to_string(count) + " values",
                entry.line);
  std::vector<double> out;
  for (auto tok : tokens) {
    auto v = text::parse_double(tok);
    if (!v || !std::isfinite(*v))
      throw Error(ErrorCode::MalformedHeader,
                  std::string(key) + " has a non-numeric value", entry.line);
    out.push_back(*v);
  }
  return out;
}

template <typename T>
void decode_voxels(std::string_view raw, std::vector<T>& out, bool big_endian) {
  const bool swap = (std::endian::native == std::endian::little) == big_endian;
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), raw.data() + n * sizeof(T), sizeof(T));
    if (swap && sizeof(T) > 1)
      std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&out[n], bytes.data(), sizeof(T));
  }
}

template <typename T>
void encode_voxels(const std::vector<T>& in, std::string& out) {
  const bool swap = std::endian::native != std::endian::little;
  for (const T& v : in) {
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &v, sizeof(T));
    if (swap && sizeof(T) > 1)
      std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), sizeof(T));
  }
}

} // namespace

ImageVolume parse_mha(std::string_view bytes) {
  std::map<std::string, HeaderEntry> header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::optional<std::size_t> data_start;

  while (pos < bytes.size()) {
    ++line_no;
    auto eol = bytes.find('\n', pos);
    const bool last = eol == std::string_view::npos;
    auto line = bytes.substr(pos, last ? std::string_view::npos : eol - pos);
    pos = last ? bytes.size() : eol + 1;

    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::MalformedHeader, "expected 'Key = Value'", line_no);
    auto key = std::string(text::trim(line.substr(0, eq)));
    auto value = text::trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorCode::MalformedHeader, "empty key", line_no);
    if (header.count(key))
      throw Error(ErrorCode::MalformedHeader, "duplicate key " + key, line_no);
    header.emplace(key, HeaderEntry{std::string(value), line_no});
    if (key == "ElementDataFile") {
      if (last)
        throw Error(ErrorCode::UnexpectedEof, "no newline after ElementDataFile", line_no);
      data_start = pos;
      break;
    }
  }
  if (!data_start)
    throw Error(ErrorCode::MissingKey, "ElementDataFile");

  const auto& object_type = require_key(header, "ObjectType");
  if (text::trim(object_type.value) != "Image")
    throw Error(ErrorCode::MalformedHeader, "ObjectType must be Image", object_type.line);

  const auto& data_file = require_key(header, "ElementDataFile");
  if (data_file.value != "LOCAL")
    throw Error(ErrorCode::MalformedHeader, "only ElementDataFile = LOCAL is supported",
                data_file.line);

  const auto& ndims_entry = require_key(header, "NDims");
  auto ndims = text::parse_int(text::trim(ndims_entry.value));
  if (!ndims || (*ndims != 2 && *ndims != 3))
    throw Error(ErrorCode::MalformedHeader, "NDims must be 2 or 3", ndims_entry.line);
  const auto nd = static_cast<std::size_t>(*ndims);

  const auto& dim_entry = require_key(header, "DimSize");
  auto dim_tokens = text::split_ws(dim_entry.value);
  if (dim_tokens.size() != nd)
    throw Error(ErrorCode::MalformedHeader, "DimSize must list NDims values", dim_entry.line);
  std::array<std::size_t, 3> dims{1, 1, 1};
  for (std::size_t a = 0; a < nd; ++a) {
    auto v = text::parse_int(dim_tokens[a]);
    if (!v || *v < 1 || static_cast<std::size_t>(*v) > kMaxDim)
      throw Error(ErrorCode::MalformedHeader, "DimSize values must be positive integers",
                  dim_entry.line);
    dims[a] = static_cast<std::size_t>(*v);
  }

  const auto& type_entry = require_key(header, "ElementType");
  const auto type_name = text::trim(type_entry.value);
  VoxelType type;
  if (type_name == "MET_UCHAR")
    type = VoxelType::u8;
  else if (type_name == "MET_SHORT")
    type = VoxelType::i16;
  else if (type_name == "MET_FLOAT")
    type = VoxelType::f32;
  else
    throw Error(ErrorCode::UnsupportedElementType, std::string(type_name), type_entry.line);

  if (const auto* ch = find_key(header, {"ElementNumberOfChannels"})) {
    auto n = text::parse_int(text::trim(ch->value));
    if (!n || *n != 1)
      throw Error(ErrorCode::UnsupportedElementType, "multi-channel voxels", ch->line);
  }
  if (const auto* e = find_key(header, {"BinaryData"}); e && !parse_bool(*e, "BinaryData"))
    throw Error(ErrorCode::MalformedHeader, "ASCII voxel data is not supported", e->line);
  if (const auto* e = find_key(header, {"CompressedData"});
      e && parse_bool(*e, "CompressedData"))
    throw Error(ErrorCode::MalformedHeader, "compressed voxel data is not supported", e->line);
  bool big_endian = false;
  if (const auto* e = find_key(header, {"BinaryDataByteOrderMSB", "ElementByteOrderMSB"}))
    big_endian = parse_bool(*e, "BinaryDataByteOrderMSB");

  Vec3 spacing{1.0, 1.0, 1.0};
  if (const auto* e = find_key(header, {"ElementSpacing", "ElementSize"})) {
    auto v = parse_reals(*e, "ElementSpacing", nd);
    for (std::size_t a = 0; a < nd; ++a) {
      if (!(v[a] > 0))
        throw Error(ErrorCode::MalformedHeader, "ElementSpacing must be positive", e->line);
      spacing[a] = v[a];
    }
  }
  Vec3 origin{};
  if (const auto* e = find_key(header, {"Offset", "Origin", "Position"})) {
    auto v = parse_reals(*e, "Offset", nd);
    for (std::size_t a = 0; a < nd; ++a)
      origin[a] = v[a];
  }

  const std::size_t elem = element_size(type);
  const auto raw = bytes.substr(*data_start);
  std::size_t count = 0;
  std::size_t expected = 0;
  if (__builtin_mul_overflow(dims[0], dims[1], &count) ||
      __builtin_mul_overflow(count, dims[2], &count) ||
      __builtin_mul_overflow(count, elem, &expected))
    throw Error(ErrorCode::MalformedHeader, "DimSize product overflows", dim_entry.line);
  if (raw.size() != expected)
    throw Error(ErrorCode::PayloadSizeMismatch,
                "expected " + std::to_string(expected) + " bytes, got " +
                  std::to_string(raw.size()));

  VoxelBuffer buffer = make_buffer(type, count);
  std::visit([&](auto& data) { decode_voxels(raw, data, big_endian); }, buffer);
  return ImageVolume(Dims{dims[0], dims[1], dims[2]}, spacing, origin, std::move(buffer));
}

std::string write_mha(const ImageVolume& volume) {
  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  const auto& o = volume.origin();
  auto triple = [](double a, double b, double c) {
    return text::format_double(a) + " " + text::format_double(b) + " " +
           text::format_double(c);
  };
  std::string out;
  out += "ObjectType = Image\n";
  out += "NDims = 3\n";
  out += "BinaryData = True\n";
  out += "BinaryDataByteOrderMSB = False\n";
  out += "CompressedData = False\n";
  out += "Offset = " + triple(o.x, o.y, o.z) + "\n";
  out += "ElementSpacing = " + triple(s.x, s.y, s.z) + "\n";
  out += "DimSize = " + std::to_string(d.nx) + " " + std::to_string(d.ny) + " " +
         std::to_string(d.nz) + "\n";
  out += "ElementType = " + std::string(element_type_name(volume.voxel_type())) + "\n";
  out += "ElementDataFile = LOCAL\n";
  std::visit([&](const auto& data) { encode_voxels(data, out); }, volume.buffer());
  return out;
}

} // namespace camikit::formats
