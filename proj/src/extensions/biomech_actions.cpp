#include "camikit/extensions/builtin.hpp"

#include "camikit/biomech/elasticity.hpp"
#include "camikit/biomech/experiment.hpp"
#include "camikit/error.hpp"
#include "camikit/formats/xml.hpp"
#include "schema.hpp"

#include <cmath>

namespace camikit::extensions {

namespace {

using namespace camikit::biomech;

const char* const kOverrides[] = {"E", "nu", "density", "spring_stiffness", "damping"};

ParameterSchema material_overrides() {
  return {optional_real("E", "Young's modulus override (Pa)", 0.0),
          optional_real("nu", "Poisson ratio override", -1.0, 0.5),
          optional_real("density", "density override (kg/m^3)", 0.0),
          optional_real("spring_stiffness", "spring stiffness override (N/m)", 0.0),
          optional_real("damping", "damping override (N s/m)", 0.0)};
}

MaterialSpec material(const PhysicalModel& model, const ParamSet& p) {
  auto m = material_from(model.material);
  for (const char* name : kOverrides) {
    if (!has_param(p, name))
      continue;
    const double v = get_real(p, name);
    const std::string_view n(name);
    if (n == "E")
      m.E = v;
    else if (n == "nu")
      m.nu = v;
    else if (n == "density")
      m.density = v;
    else if (n == "spring_stiffness")
      m.spring_stiffness = v;
    else
      m.damping = v;
  }
  return m;
}

LoadSet loads_from(std::span<const ActionInput> in, const PhysicalModel& model) {
  if (in.size() < 2)
    return {};
  const auto& doc = input_as<GenericData>(in[1]);
  return formats::parse_lml(formats::parse_xml(doc.bytes), &model);
}

ActionDescriptor solver_action(std::string name, std::string description) {
  ActionDescriptor d;
  d.name = std::move(name);
  d.applies_to = {ComponentKind::physical_model};
  d.target_kinds = {ComponentKind::physical_model, ComponentKind::generic};
  d.min_targets = 1;
  d.max_targets = 2;
  d.outputs = {ComponentKind::physical_model, ComponentKind::generic};
  d.category = "biomech";
  d.description = std::move(description);
  d.parameters = material_overrides();
  return d;
}

PhysicalModel deformed(PhysicalModel model, const DisplacementField& u) {
  for (std::size_t i = 0; i < model.nodes.size(); ++i)
    model.nodes[i] += u[i];
  return model;
}

// Reports carry no wall-clock time, so repeated runs give identical bytes.
std::vector<ActionOutput> solve(std::span<const ActionInput> in, const ParamSet& p,
                                SimulationSettings sim) {
  const auto& model = input_as<PhysicalModel>(in[0]);
  const auto loads = loads_from(in, model);
  const auto system = make_system(model, material(model, p), sim.mode);
  MonitoringSpec spec;
  spec.metrics = {Metric::rms_displacement, Metric::max_displacement};
  spec.simulation = sim;
  const auto report = run_experiment(system, loads, spec);
  std::vector<ActionOutput> out;
  out.push_back({"deformed", deformed(model, report.displacement)});
  out.push_back(json_output("report", to_json(report, true)));
  return out;
}

} // namespace

std::vector<Action> biomech_actions() {
  std::vector<Action> out;

  {
    auto d = solver_action("static_solve",
                           "Linear tetrahedral FEM; optional second target holds the loads");
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     return solve(in, p, {SimulationMode::static_fem, 1e-3, 1});
                   }});
  }
  {
    auto d = solver_action("dynamic_simulate",
                           "Mass-spring integration; optional second target holds the loads");
    d.parameters.push_back(real("dt", 1e-3, "time step (s)", 1e-12));
    d.parameters.push_back(integer("steps", 100, "number of steps", 1, 10000000));
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     return solve(in, p,
                                  {SimulationMode::dynamic_mass_spring, get_real(p, "dt"),
                                   static_cast<std::size_t>(get_int(p, "steps"))});
                   }});
  }
  {
    ActionDescriptor d;
    d.name = "evaluate_mml";
    d.applies_to = {ComponentKind::generic};
    d.outputs = {ComponentKind::generic};
    d.category = "biomech";
    d.description = "Runs the experiment described by a monitoring document";
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet&) {
                     const auto& doc = input_as<GenericData>(in[0]);
                     const auto base = std::filesystem::path(doc.source).parent_path();
                     const auto ex = load_experiment(doc.bytes, base);
                     const auto system =
                       make_system(ex.model, material_from(ex.model.material), ex.spec.simulation.mode);
                     const auto report = run_experiment(system, ex.loads, ex.spec,
                                                        ex.reference ? &*ex.reference : nullptr);
                     return std::vector<ActionOutput>{json_output("metrics", to_json(report))};
                   }});
  }
  {
    ActionDescriptor d;
    d.name = "estimate_elasticity";
    d.applies_to = {ComponentKind::generic};
    d.outputs = {ComponentKind::generic};
    d.category = "biomech";
    d.description =
      "Inverts a pressure/height curve against a library on a geometric E grid";
    d.parameters = {real("E_min", 1e3, "smallest library modulus (Pa)", 1e-9),
                    real("E_max", 1e5, "largest library modulus (Pa)", 1e-9),
                    integer("entries", 100, "library size", 1, 100000),
                    real("aperture_mm", 1.0, "aperture radius (mm)", 1e-9),
                    real("phi", 1.0, "apparatus constant", 1e-9)};
    out.push_back({d, [](std::span<const ActionInput> in, const ParamSet& p) {
                     const auto curve = parse_curve_csv(input_as<GenericData>(in[0]).bytes);
                     const double lo = get_real(p, "E_min"), hi = get_real(p, "E_max");
                     const auto n = static_cast<std::size_t>(get_int(p, "entries"));
                     if (n > 1 && !(lo < hi))
                       throw Error(ErrorCode::BadGrid, "E_min must be below E_max");
                     std::vector<double> Es;
                     for (std::size_t i = 0; i < n; ++i)
                       Es.push_back(n == 1 ? lo
                                           : lo * std::pow(hi / lo, static_cast<double>(i) /
                                                                      static_cast<double>(n - 1)));
                     const auto lib = build_library(Es, curve.pressures, get_real(p, "aperture_mm"),
                                                    get_real(p, "phi"));
                     const auto est = estimate_elasticity(curve, lib);
                     nlohmann::json j{{"E_pa", est.E},
                                      {"residual_mm2", est.residual},
                                      {"best_entry", est.best_entry},
                                      {"weight", est.weight}};
                     return std::vector<ActionOutput>{json_output("elasticity", j)};
                   }});
  }
  return out;
}

} // namespace camikit::extensions
