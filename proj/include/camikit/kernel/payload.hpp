#pragma once

#include "camikit/formats/documents.hpp"
#include "camikit/formats/image_volume.hpp"
#include "camikit/formats/surface_mesh.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace camikit {

enum class ComponentKind { image, mesh, physical_model, generic };

std::string_view to_string(ComponentKind kind) noexcept;
std::optional<ComponentKind> component_kind_from_string(std::string_view name) noexcept;

/// Opaque bytes with a media type, e.g. JSON reports or XML documents.
/// `source` records where the bytes were read from, so documents can
/// resolve relative references.
struct GenericData {
  std::string media_type;
  std::string bytes;
  std::string source;

  friend bool operator==(const GenericData&, const GenericData&) = default;
};

using Payload = std::variant<ImageVolume, SurfaceMesh, PhysicalModel, GenericData>;

ComponentKind kind_of(const Payload& payload) noexcept;

/// Canonical byte serialization used for equality and purity checks:
/// MHA for volumes, OFF plus normals for meshes, PML for physical models,
/// media type + bytes for generic data.
std::string serialize_payload(const Payload& payload);

} // namespace camikit
