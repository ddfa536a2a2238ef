#pragma once

#include "camikit/biomech/mechanics.hpp"
#include "camikit/formats/surface_mesh.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace camikit::biomech {

/// sqrt(mean |a_i - b_i|^2). Throws LengthMismatch.
double rms_error(const DisplacementField& a, const DisplacementField& b);

struct Deviation {
  std::vector<double> distances;
  double mean = 0;
  double max = 0;
  double std = 0; // population, over the per-vertex distances
};

/// Exact point-to-nearest-triangle distance from every vertex of `m` to
/// `ref`, brute force over the triangles. Throws EmptyReference.
Deviation geometric_deviation(const SurfaceMesh& m, const SurfaceMesh& ref);

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct MetricsReport {
  std::vector<Metric> metrics;
  std::optional<double> rms_displacement; // m
  std::optional<double> max_displacement; // m
  std::optional<Deviation> deviation;     // mm
  std::optional<double> computing_time_ms;
  std::string system_hash;
  std::size_t solver_iterations = 0;
  double residual = 0;
  DisplacementField displacement;
};

/// Runs the solve named by spec.simulation.mode and computes exactly the
/// requested metrics. `reference` is required for geometric_deviation; the
/// deformed model surface (or its nodes, for spring-only models) is
/// compared in millimetres.
MetricsReport run_experiment(const MechanicalSystem& system, const LoadSet& loads,
                             const MonitoringSpec& spec,
                             const SurfaceMesh* reference = nullptr);

nlohmann::json to_json(const MetricsReport& report, bool include_field = false);

enum class SweepParam { E, spring_stiffness, damping, dt };

std::string_view to_string(SweepParam p) noexcept;
std::optional<SweepParam> sweep_param_from_string(std::string_view name) noexcept;

struct SweepAxis {
  SweepParam param;
  std::vector<double> values;
};

using SweepGrid = std::vector<SweepAxis>;

/// Columns of a grid CSV: a header of parameter names, then values listed
/// down each column (columns may differ in length; blank cells end them).
SweepGrid parse_grid_csv(std::string_view text);

struct SweepRow {
  std::vector<double> point; // one value per axis
  bool ok = false;
  std::optional<MetricsReport> report;
  std::string error;
};

/// Cartesian product of the axes, first axis slowest. Failures are recorded
/// per row. Throws BadGrid on an empty grid.
std::vector<SweepRow> sweep(const PhysicalModel& geometry, const MaterialSpec& material,
                            const LoadSet& loads, const MonitoringSpec& spec,
                            const SweepGrid& grid, const SurfaceMesh* reference = nullptr);

/// Header: grid parameters, status, then metric columns, then error.
std::string sweep_to_csv(const SweepGrid& grid, const MonitoringSpec& spec,
                         const std::vector<SweepRow>& rows);

} // namespace camikit::biomech
