#include "camikit/extensions/builtin.hpp"

#include "camikit/error.hpp"
#include "camikit/imaging/imaging.hpp"
#include "schema.hpp"

namespace camikit::extensions {

namespace {

using imaging::SliceAxis;

ActionDescriptor image_action(std::string name, ComponentKind output, std::string description) {
  ActionDescriptor d;
  d.name = std::move(name);
  d.applies_to = {ComponentKind::image};
  d.outputs = {output};
  d.category = "imaging";
  d.description = std::move(description);
  return d;
}

const ImageVolume& volume(std::span<const ActionInput> in) { return input_as<ImageVolume>(in[0]); }

std::size_t index_param(const ParamSet& p, const std::string& name) {
  return static_cast<std::size_t>(get_int(p, name));
}

} // namespace

std::vector<Action> imaging_actions() {
  std::vector<Action> out;

  {
    auto d = image_action("threshold", ComponentKind::image,
                          "Binary map: inside where low <= x <= high, outside elsewhere");
    d.parameters = {real("low", {}, "lower bound, inclusive"),
                    real("high", {}, "upper bound, inclusive"),
                    real("inside", 1.0, "value inside the range"),
                    real("outside", 0.0, "value outside the range")};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     return std::vector<ActionOutput>{
                       {"", imaging::threshold(volume(in), get_real(p, "low"), get_real(p, "high"),
                                               get_real(p, "inside"), get_real(p, "outside"))}};
                   }});
  }
  {
    auto d = image_action("box_smooth", ComponentKind::image,
                          "Mean over a (2r+1)^3 box with clamp-to-edge borders");
    d.parameters = {integer("radius", 1, "box half-width in voxels", 1, 64)};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     return std::vector<ActionOutput>{
                       {"", imaging::box_smooth(volume(in), static_cast<int>(get_int(p, "radius")))}};
                   }});
  }
  {
    auto d = image_action("crop", ComponentKind::image, "Sub-volume over inclusive index ranges");
    for (const char* axis : {"i", "j", "k"}) {
      d.parameters.push_back(integer(std::string(axis) + "_min", {}, "first index kept", 0));
      d.parameters.push_back(integer(std::string(axis) + "_max", {}, "last index kept", 0));
    }
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     const std::array<std::size_t, 3> lo{index_param(p, "i_min"),
                                                         index_param(p, "j_min"),
                                                         index_param(p, "k_min")};
                     const std::array<std::size_t, 3> hi{index_param(p, "i_max"),
                                                         index_param(p, "j_max"),
                                                         index_param(p, "k_max")};
                     return std::vector<ActionOutput>{{"", imaging::crop(volume(in), lo, hi)}};
                   }});
  }
  {
    auto d = image_action("voxel_stats", ComponentKind::generic,
                          "Population statistics and a 256-bin histogram");
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet&) {
                     const auto s = imaging::voxel_stats(volume(in));
                     nlohmann::json j{{"min", s.min},   {"max", s.max},     {"mean", s.mean},
                                      {"std", s.std},   {"count", s.count},
                                      {"histogram", s.histogram}};
                     return std::vector<ActionOutput>{json_output("stats", j)};
                   }});
  }
  {
    auto d = image_action("extract_slice", ComponentKind::image,
                          "Orthogonal slice, stored as a w x h x 1 volume");
    d.parameters = {choice("axis", {"axial", "coronal", "sagittal"}, "slice orientation"),
                    integer("index", {}, "slice index along the axis", 0)};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     const auto axis = *imaging::slice_axis_from_string(get_string(p, "axis"));
                     const auto s = imaging::extract_slice(volume(in), axis, index_param(p, "index"));
                     return std::vector<ActionOutput>{
                       {"slice_" + get_string(p, "axis"), imaging::slice_to_volume(s)}};
                   }});
  }
  {
    auto d = image_action("oblique_slice", ComponentKind::image,
                          "Trilinear resampling on the grid origin + a*u + b*w");
    d.parameters = {real3("origin", {0, 0, 0}, "plane origin (mm)"),
                    real3("u", {1, 0, 0}, "step between columns (mm)"),
                    real3("w", {0, 1, 0}, "step between rows (mm)"),
                    integer("samples_u", 64, "columns", 1, 4096),
                    integer("samples_w", 64, "rows", 1, 4096)};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     const auto s = imaging::oblique_slice(
                       volume(in), get_vec3(p, "origin"), get_vec3(p, "u"), get_vec3(p, "w"),
                       index_param(p, "samples_u"), index_param(p, "samples_w"));
                     return std::vector<ActionOutput>{{"oblique", imaging::slice_to_volume(s)}};
                   }});
  }
  {
    auto d = image_action("isosurface", ComponentKind::mesh,
                          "Marching cubes surface at the isovalue");
    d.parameters = {real("isovalue", {}, "surface level")};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     return std::vector<ActionOutput>{
                       {"isosurface", imaging::isosurface(volume(in), get_real(p, "isovalue"))}};
                   }});
  }
  return out;
}

} // namespace camikit::extensions
