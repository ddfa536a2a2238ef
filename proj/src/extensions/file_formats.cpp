#include "camikit/extensions/builtin.hpp"

#include "camikit/error.hpp"
#include "camikit/formats/mesh_io.hpp"
#include "camikit/formats/mha.hpp"
#include "camikit/formats/xml.hpp"

namespace camikit::extensions {

namespace {

ComponentFormat text_document(std::string suffix, std::string media_type,
                              std::function<void(std::string_view)> check = {}) {
  ComponentFormat f;
  f.suffix = std::move(suffix);
  f.kind = ComponentKind::generic;
  f.read = [media_type, check](std::string_view bytes, const std::filesystem::path& path) {
    if (check)
      check(bytes);
    return Payload{GenericData{media_type, std::string(bytes), path.string()}};
  };
  f.write = [](const Payload& p) { return std::get<GenericData>(p).bytes; };
  return f;
}

} // namespace

std::vector<ComponentFormat> file_formats() {
  std::vector<ComponentFormat> out;

  out.push_back({".mha", ComponentKind::image,
                 [](std::string_view bytes, const std::filesystem::path&) {
                   return Payload{formats::parse_mha(bytes)};
                 },
                 [](const Payload& p) { return formats::write_mha(std::get<ImageVolume>(p)); }});

  out.push_back({".off", ComponentKind::mesh,
                 [](std::string_view bytes, const std::filesystem::path&) {
                   return Payload{formats::parse_off(bytes)};
                 },
                 [](const Payload& p) { return formats::write_off(std::get<SurfaceMesh>(p)); }});
  out.push_back({".obj", ComponentKind::mesh,
                 [](std::string_view bytes, const std::filesystem::path&) {
                   return Payload{formats::parse_obj(bytes)};
                 },
                 [](const Payload& p) { return formats::write_obj(std::get<SurfaceMesh>(p)); }});

  out.push_back({".pml", ComponentKind::physical_model,
                 [](std::string_view bytes, const std::filesystem::path&) {
                   return Payload{formats::parse_pml(formats::parse_xml(bytes))};
                 },
                 [](const Payload& p) {
                   return formats::write_xml(formats::to_xml(std::get<PhysicalModel>(p)), true);
                 }});

  // load and monitoring documents stay as text; actions parse them against
  // the model they are used with
  out.push_back(text_document(".lml", "application/x-lml+xml", [](std::string_view b) {
    formats::parse_lml(formats::parse_xml(b));
  }));
  out.push_back(text_document(".mml", "application/x-mml+xml", [](std::string_view b) {
    formats::parse_mml(formats::parse_xml(b));
  }));
  out.push_back(text_document(".xml", "application/xml",
                              [](std::string_view b) { formats::parse_xml(b); }));
  out.push_back(text_document(".csv", "text/csv"));
  out.push_back(text_document(".json", "application/json"));
  return out;
}

} // namespace camikit::extensions
