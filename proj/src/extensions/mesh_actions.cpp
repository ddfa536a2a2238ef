#include "camikit/extensions/builtin.hpp"

#include "camikit/mesh/mesh_ops.hpp"
#include "schema.hpp"

namespace camikit::extensions {

namespace {

ActionDescriptor mesh_action(std::string name, ComponentKind output, std::string description) {
  ActionDescriptor d;
  d.name = std::move(name);
  d.applies_to = {ComponentKind::mesh};
  d.outputs = {output};
  d.category = "mesh";
  d.description = std::move(description);
  return d;
}

const SurfaceMesh& surface(std::span<const ActionInput> in) { return input_as<SurfaceMesh>(in[0]); }

} // namespace

std::vector<Action> mesh_actions() {
  std::vector<Action> out;

  {
    auto d = mesh_action("transform_mesh", ComponentKind::mesh,
                         "Scale, then rotate about x, y, z, then translate");
    d.parameters = {real3("translation", {0, 0, 0}, "offset (mm)"),
                    real3("rotation_deg", {0, 0, 0}, "rotation about x, y, z (degrees)"),
                    real3("scale", {1, 1, 1}, "per-axis scale")};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     const auto t = mesh::Affine4::translate(get_vec3(p, "translation")) *
                                    mesh::Affine4::rotate_xyz_deg(get_vec3(p, "rotation_deg")) *
                                    mesh::Affine4::scale(get_vec3(p, "scale"));
                     return std::vector<ActionOutput>{{"", mesh::transform_mesh(surface(in), t)}};
                   }});
  }
  {
    auto d = mesh_action("surface_area", ComponentKind::generic, "Total triangle area (mm^2)");
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet&) {
                     return std::vector<ActionOutput>{json_output(
                       "surface_area", {{"surface_area_mm2", mesh::surface_area(surface(in))}})};
                   }});
  }
  {
    auto d = mesh_action("enclosed_volume", ComponentKind::generic,
                         "Volume of a closed mesh (mm^3)");
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet&) {
                     return std::vector<ActionOutput>{json_output(
                       "enclosed_volume", {{"volume_mm3", mesh::enclosed_volume(surface(in))}})};
                   }});
  }
  {
    auto d = mesh_action("euler_characteristic", ComponentKind::generic, "V - E + F");
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet&) {
                     const auto& m = surface(in);
                     return std::vector<ActionOutput>{json_output(
                       "euler_characteristic",
                       {{"euler_characteristic", mesh::euler_characteristic(m)},
                        {"boundary_edges", mesh::boundary_edges(m).size()}})};
                   }});
  }
  {
    auto d = mesh_action("compute_normals", ComponentKind::mesh,
                         "Area-weighted vertex normals; isolated vertices get (0,0,1)");
    d.outputs = {ComponentKind::mesh, ComponentKind::generic};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet&) {
                     auto r = mesh::compute_normals(surface(in));
                     nlohmann::json report{{"fallback_vertices", r.fallback_vertices}};
                     std::vector<ActionOutput> o;
                     o.push_back({"", std::move(r.mesh)});
                     o.push_back(json_output("normals_report", report));
                     return o;
                   }});
  }
  {
    auto d = mesh_action("laplacian_smooth", ComponentKind::mesh,
                         "Uniform Laplacian smoothing, simultaneous updates");
    d.parameters = {integer("iterations", 10, "smoothing passes", 0, 10000),
                    real("lambda", 0.5, "step towards the 1-ring average", 0.0, 1.0)};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     return std::vector<ActionOutput>{
                       {"", mesh::laplacian_smooth(surface(in),
                                                   static_cast<int>(get_int(p, "iterations")),
                                                   get_real(p, "lambda"))}};
                   }});
  }
  return out;
}

} // namespace camikit::extensions
