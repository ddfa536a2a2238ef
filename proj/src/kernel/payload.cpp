#include "camikit/kernel/payload.hpp"

#include "camikit/formats/mesh_io.hpp"
#include "camikit/formats/mha.hpp"
#include "camikit/text.hpp"

namespace camikit {

std::string_view to_string(ComponentKind kind) noexcept {
  switch (kind) {
  case ComponentKind::image: return "image";
  case ComponentKind::mesh: return "mesh";
  case ComponentKind::physical_model: return "physical_model";
  case ComponentKind::generic: return "generic";
  }
  return "?";
}

std::optional<ComponentKind> component_kind_from_string(std::string_view name) noexcept {
  for (auto k : {ComponentKind::image, ComponentKind::mesh, ComponentKind::physical_model,
                 ComponentKind::generic})
    if (to_string(k) == name)
      return k;
  return std::nullopt;
}

ComponentKind kind_of(const Payload& payload) noexcept {
  return static_cast<ComponentKind>(payload.index());
}

std::string serialize_payload(const Payload& payload) {
  struct Visitor {
    std::string operator()(const ImageVolume& v) const { return formats::write_mha(v); }
    std::string operator()(const SurfaceMesh& m) const {
      auto out = formats::write_off(m);
      for (const auto& n : m.normals)
        out += "n " + text::format_double(n.x) + " " + text::format_double(n.y) + " " +
               text::format_double(n.z) + "\n";
      return out;
    }
    std::string operator()(const PhysicalModel& p) const {
      return formats::write_xml(formats::to_xml(p));
    }
    std::string operator()(const GenericData& g) const {
      return g.media_type + "\n" + g.bytes;
    }
  };
  return std::visit(Visitor{}, payload);
}

} // namespace camikit
