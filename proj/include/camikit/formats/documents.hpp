#pragma once

#include "camikit/formats/xml.hpp"
#include "camikit/geometry.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace camikit {

/// Material named by a physical model. `properties` holds optional inline
/// overrides (E, nu, density, spring_stiffness, damping).
struct MaterialRef {
  std::string ref;
  std::vector<std::pair<std::string, double>> properties;

  friend bool operator==(const MaterialRef&, const MaterialRef&) = default;
};

/// Mechanical geometry. Node positions are in metres.
struct PhysicalModel {
  std::vector<Vec3> nodes;
  std::vector<std::array<std::size_t, 4>> tetrahedra;
  std::vector<std::array<std::size_t, 2>> springs;
  MaterialRef material;
  std::vector<std::size_t> fixed_nodes; // sorted, unique

  friend bool operator==(const PhysicalModel&, const PhysicalModel&) = default;
};

/// Six times the signed volume of tetrahedron (a, b, c, d).
double tetra_signed_volume6(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) noexcept;

enum class LoadType { force, displacement };

struct Load {
  std::vector<std::size_t> targets;
  LoadType type = LoadType::force;
  Vec3 vector{}; // N for forces, m for displacements

  friend bool operator==(const Load&, const Load&) = default;
};

struct LoadSet {
  std::vector<Load> loads;

  friend bool operator==(const LoadSet&, const LoadSet&) = default;
};

enum class Metric { rms_displacement, max_displacement, geometric_deviation, computing_time };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> metric_from_string(std::string_view name) noexcept;

enum class SimulationMode { static_fem, dynamic_mass_spring };

/// Simulation settings carried by a monitoring document.
struct SimulationSettings {
  SimulationMode mode = SimulationMode::static_fem;
  double dt = 1e-3;
  std::size_t steps = 100;

  friend bool operator==(const SimulationSettings&, const SimulationSettings&) = default;
};

/// What to measure for one experiment. Paths are kept as written; callers
/// resolve them relative to the monitoring document.
struct MonitoringSpec {
  std::vector<Metric> metrics; // sorted, unique, non-empty
  std::optional<std::string> reference;
  std::optional<std::string> model_path;
  std::optional<std::string> loads_path;
  SimulationSettings simulation;

  bool wants(Metric m) const noexcept;

  friend bool operator==(const MonitoringSpec&, const MonitoringSpec&) = default;
};

namespace formats {

/// `<physicalModel>` document. Tetrahedra with negative signed volume are
/// reoriented by swapping their last two nodes; degenerate ones are rejected.
PhysicalModel parse_pml(const XmlNode& root);
XmlNode to_xml(const PhysicalModel& model);

/// `<loads>` document. When `model` is given, targets are range-checked and
/// displacement loads on fixed nodes are rejected.
LoadSet parse_lml(const XmlNode& root, const PhysicalModel* model = nullptr);
XmlNode to_xml(const LoadSet& loads);

/// Throws SchemaError if a load targets a missing node or imposes a
/// displacement on a fixed node.
void check_loads(const LoadSet& loads, const PhysicalModel& model);

/// `<monitoring>` document.
MonitoringSpec parse_mml(const XmlNode& root);
XmlNode to_xml(const MonitoringSpec& spec);

} // namespace formats
} // namespace camikit
