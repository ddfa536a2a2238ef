#include "camikit/extensions/builtin.hpp"

namespace camikit {

namespace {

std::vector<std::string> suffixes(const std::vector<ComponentFormat>& formats) {
  std::vector<std::string> out;
  for (const auto& f : formats)
    out.push_back(f.suffix);
  return out;
}

std::vector<std::string> names(const std::vector<Action>& actions) {
  std::vector<std::string> out;
  for (const auto& a : actions)
    out.push_back(a.descriptor.name);
  return out;
}

void add_actions(Kernel& k, std::string id, std::string name, std::string description,
                 std::vector<Action> actions) {
  const ExtensionManifest m{std::move(id), ExtensionKind::action, std::move(name), "1.0.0", {},
                            names(actions), std::move(description)};
  k.register_extension(m, std::move(actions));
}

} // namespace

void register_builtin_extensions(Kernel& kernel) {
  auto formats = extensions::file_formats();
  const ExtensionManifest io{"org.camikit.file_formats", ExtensionKind::component, "File formats",
                             "1.0.0", suffixes(formats), {},
                             "MHA volumes, OFF/OBJ meshes, PML models and text documents"};
  kernel.register_extension(io, std::move(formats));
  add_actions(kernel, "org.camikit.imaging", "Imaging", "Volume filters, slicing, isosurfaces",
              extensions::imaging_actions());
  add_actions(kernel, "org.camikit.mesh", "Mesh processing", "Transforms, metrics, smoothing",
              extensions::mesh_actions());
  add_actions(kernel, "org.camikit.biomech", "Biomechanics",
              "Static and dynamic solvers, monitoring, elasticity estimation",
              extensions::biomech_actions());
  kernel.register_extension({"org.camikit.slice_viewer", ExtensionKind::viewer, "Slice viewer",
                             "1.0.0", {}, {}, "Orthogonal slices served as PNG"},
                            std::monostate{});
  kernel.register_extension({"org.camikit.workbench", ExtensionKind::application, "Workbench",
                             "1.0.0", {}, {}, "Command line and HTTP service"},
                            std::monostate{});
}

} // namespace camikit
