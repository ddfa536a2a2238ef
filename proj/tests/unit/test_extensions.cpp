#include "doctest.h"

#include "fixtures.hpp"
#include "scenarios.hpp"

#include "camikit/error.hpp"
#include "camikit/extensions/builtin.hpp"
#include "camikit/kernel/kernel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace camikit;

namespace {

const std::string kData = CAMIKIT_TEST_DATA;

struct Call {
  std::string action;
  std::vector<std::string> inputs;
  ParamSet params;
};

// Every shipped action with inputs it accepts.
const std::vector<Call>& calls() {
  static const std::vector<Call> all = {
    {"threshold", {"vol"}, {{"low", 0.5}, {"high", 10.0}}},
    {"box_smooth", {"vol"}, {{"radius", std::int64_t{1}}}},
    {"crop", {"vol"},
     {{"i_min", std::int64_t{1}}, {"i_max", std::int64_t{5}}, {"j_min", std::int64_t{0}},
      {"j_max", std::int64_t{3}}, {"k_min", std::int64_t{2}}, {"k_max", std::int64_t{2}}}},
    {"voxel_stats", {"vol"}, {}},
    {"extract_slice", {"vol"}, {{"axis", std::string("coronal")}, {"index", std::int64_t{4}}}},
    {"oblique_slice", {"vol"},
     {{"origin", Vec3{1, 1, 1}}, {"u", Vec3{1, 1, 0}}, {"w", Vec3{0, 0, 1}},
      {"samples_u", std::int64_t{8}}, {"samples_w", std::int64_t{5}}}},
    {"isosurface", {"vol"}, {{"isovalue", 0.0}}},
    {"transform_mesh", {"cube"},
     {{"translation", Vec3{1, 2, 3}}, {"rotation_deg", Vec3{0, 0, 90}}, {"scale", Vec3{2, 1, 1}}}},
    {"surface_area", {"cube"}, {}},
    {"enclosed_volume", {"cube"}, {}},
    {"euler_characteristic", {"cube"}, {}},
    {"compute_normals", {"cube"}, {}},
    {"laplacian_smooth", {"cube"}, {{"iterations", std::int64_t{3}}}},
    {"static_solve", {"bar", "lml"}, {}},
    {"dynamic_simulate", {"lattice", "pull"}, {{"steps", std::int64_t{20}}, {"damping", 0.5}}},
    {"evaluate_mml", {"mml"}, {}},
    {"estimate_elasticity", {"curve"}, {}},
  };
  return all;
}

struct Bench {
  Kernel kernel;
  std::map<std::string, ComponentId> ids;

  Bench() {
    register_builtin_extensions(kernel);
    ids["vol"] = kernel.add_component("vol", fixtures::sphere_field(9, 3.0));
    ids["cube"] = kernel.add_component("cube", fixtures::unit_cube());
    ids["bar"] = kernel.open_component(kData + "/bar.pml");
    ids["lml"] = kernel.open_component(kData + "/bar_tip.lml");
    ids["mml"] = kernel.open_component(kData + "/bar.mml");
    ids["curve"] = kernel.open_component(kData + "/aspiration.curve.csv");
    auto lattice = fixtures::spring_lattice(3, 0.01);
    lattice.material.properties = {{"density", 1000.0}, {"spring_stiffness", 50.0}};
    lattice.fixed_nodes = {0, 1, 2, 3};
    ids["lattice"] = kernel.add_component("lattice", lattice);
    ids["pull"] = kernel.add_component(
        "pull", GenericData{"application/xml",
                            R"(<loads><load type="force" target="8 9 10 11" x="0" y="0" z="0.1"/></loads>)",
                            ""});
  }

  std::vector<ComponentId> run(const Call& c) {
    std::vector<ComponentId> targets;
    for (const auto& in : c.inputs)
      targets.push_back(ids.at(in));
    return kernel.apply_action(c.action, targets, c.params);
  }

  nlohmann::json report(ComponentId id) const {
    return nlohmann::json::parse(std::get<GenericData>(*kernel.payload(id)).bytes);
  }
};

} // namespace

TEST_CASE("every shipped action is exercised") {
  Kernel k;
  register_builtin_extensions(k);
  std::set<std::string> listed, covered;
  for (const auto& d : k.list_actions())
    listed.insert(d.name);
  for (const auto& c : calls())
    covered.insert(c.action);
  CHECK(listed == covered);
}

TEST_CASE("actions are pure, deterministic, and produce declared kinds") {
  Bench a, b;
  for (const auto& c : calls()) {
    CAPTURE(c.action);
    std::vector<std::string> before;
    for (const auto& in : c.inputs)
      before.push_back(serialize_payload(*a.kernel.payload(a.ids.at(in))));

    const auto out_a = a.run(c);
    const auto out_b = b.run(c);
    REQUIRE_FALSE(out_a.empty());
    REQUIRE(out_a.size() == out_b.size());

    for (std::size_t i = 0; i < c.inputs.size(); ++i)
      CHECK(serialize_payload(*a.kernel.payload(a.ids.at(c.inputs[i]))) == before[i]);

    const auto& declared = a.kernel.describe_action(c.action).outputs;
    for (std::size_t o = 0; o < out_a.size(); ++o) {
      const auto kind = a.kernel.component(out_a[o]).kind;
      CHECK(std::find(declared.begin(), declared.end(), kind) != declared.end());
      CHECK(serialize_payload(*a.kernel.payload(out_a[o])) ==
            serialize_payload(*b.kernel.payload(out_b[o])));
      CHECK(a.kernel.component(out_a[o]).parent ==
            std::optional<ComponentId>(a.ids.at(c.inputs[0])));
    }
  }
  CHECK(fixtures::forest_ok(a.kernel));
}

TEST_CASE("mesh reports on the unit cube") {
  Bench b;
  auto first = [&](const char* action) { return b.report(b.run({action, {"cube"}, {}})[0]); };
  CHECK(first("surface_area")["surface_area_mm2"].get<double>() == doctest::Approx(6.0));
  CHECK(first("enclosed_volume")["volume_mm3"].get<double>() == doctest::Approx(1.0));
  const auto euler = first("euler_characteristic");
  CHECK(euler["euler_characteristic"] == 2);
  CHECK(euler["boundary_edges"] == 0);
}

TEST_CASE("static_solve on the shipped bar approaches FL/(EA)") {
  Bench b;
  const auto out = b.run({"static_solve", {"bar", "lml"}, {}});
  REQUIRE(out.size() == 2);
  const auto report = b.report(out[1]);
  // E = 1e6 Pa, nu = 0, total tip force 1 N; L and A from the node extents
  const auto& pm = std::get<PhysicalModel>(*b.kernel.payload(b.ids.at("bar")));
  double length = 0, ymax = 0, zmax = 0;
  for (const auto& n : pm.nodes) {
    length = std::max(length, n.x);
    ymax = std::max(ymax, n.y);
    zmax = std::max(zmax, n.z);
  }
  const double expected = 1.0 * length / (1e6 * ymax * zmax);
  const double tip = report["metrics"]["max_displacement"]["value"].get<double>();
  CHECK(std::abs(tip - expected) / expected < 0.02);
  CHECK_FALSE(report.contains("computing_time"));

  // the overridden modulus scales the answer exactly
  const auto half = b.run({"static_solve", {"bar", "lml"}, {{"E", 5e5}}});
  const double tip_half = b.report(half[1])["metrics"]["max_displacement"]["value"].get<double>();
  CHECK(std::abs(tip_half / tip - 2.0) < 1e-8);
}

TEST_CASE("static_solve rejects a second target of the wrong kind") {
  Bench b;
  CHECK_THROWS_AS(b.run({"static_solve", {"bar", "cube"}, {}}), Error);
  CHECK_THROWS_AS(b.run({"static_solve", {"lml"}, {}}), Error);
}

TEST_CASE("evaluate_mml reports the requested metrics") {
  Bench b;
  const auto out = b.run({"evaluate_mml", {"mml"}, {}});
  const auto j = b.report(out[0]);
  CHECK(j["metrics"].contains("rms_displacement"));
  CHECK(j["metrics"].contains("max_displacement"));
  CHECK(j["metrics"].contains("geometric_deviation"));
  CHECK_FALSE(j["metrics"].contains("computing_time"));
}

TEST_CASE("estimate_elasticity on a linear curve") {
  Bench b;
  const auto j = b.report(b.run({"estimate_elasticity", {"curve"}, {}})[0]);
  CHECK(j["E_pa"].get<double>() > 1e3);
  CHECK(j["E_pa"].get<double>() < 1e5);
  CHECK(j["residual_mm2"].get<double>() >= 0);
}

TEST_CASE("random pipelines match manual application") {
  fixtures::Rng rng(31);
  for (int n = 0; n < 20; ++n) {
    const auto c = fixtures::random_pipeline(rng);
    CAPTURE(n);
    CHECK(fixtures::compare_pipeline_to_manual(c) == "");
  }
}
