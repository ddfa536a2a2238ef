#pragma once

#include "camikit/formats/documents.hpp"
#include "camikit/formats/surface_mesh.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace camikit::biomech {

/// Isotropic Hookean material. SI units throughout.
struct MaterialSpec {
  double E = 1e6;                 // Pa
  double nu = 0.3;
  double density = 1000.0;        // kg/m^3
  double spring_stiffness = 100.0; // N/m
  double damping = 0.0;           // N s/m

  friend bool operator==(const MaterialSpec&, const MaterialSpec&) = default;
};

/// Throws InvalidMaterial.
void validate_material(const MaterialSpec& m);

/// Material from a PML <material> element; unspecified properties keep the
/// MaterialSpec defaults.
MaterialSpec material_from(const MaterialRef& ref);

/// Cross-section used to give springs a mass.
inline constexpr double kSpringSectionM2 = 1e-4;
/// Mass given to nodes that no element touches.
inline constexpr double kIsolatedNodeMassKg = 1e-3;

struct MechanicalSystem {
  PhysicalModel geometry;
  MaterialSpec material;
  SimulationMode mode = SimulationMode::static_fem;
  std::vector<double> masses;                  // kg, per node
  std::vector<std::size_t> default_mass_nodes; // nodes given kIsolatedNodeMassKg
};

/// Checks the material and the mode's element requirements and lumps the
/// masses. Throws InvalidMaterial or InvalidSystem.
MechanicalSystem make_system(PhysicalModel geometry, const MaterialSpec& material,
                             SimulationMode mode);

using DisplacementField = std::vector<Vec3>;

/// Row-compressed symmetric matrix over the free degrees of freedom.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> cols;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const noexcept;
};

/// K u = f after Dirichlet reduction. Degree of freedom 3*node+axis maps to
/// `free_index` (or -1 when prescribed, with its value in `prescribed`).
struct AssembledSystem {
  SparseMatrix K;
  std::vector<double> f;
  std::vector<std::int64_t> free_index;
  std::vector<double> prescribed;

  std::size_t unknowns() const noexcept { return f.size(); }
};

/// Throws InvalidSystem, InvertedElement, NullspaceDetected, SchemaError
/// (loads not matching the geometry).
AssembledSystem assemble_static(const MechanicalSystem& system, const LoadSet& loads);

struct StaticSolution {
  DisplacementField u;
  std::size_t iterations = 0;
  double residual = 0.0; // relative
};

/// Unpreconditioned CG to relative residual 1e-8, at most 10 n iterations.
/// Throws SolverDiverged.
StaticSolution static_solve(const MechanicalSystem& system, const LoadSet& loads);

struct Trajectory {
  std::vector<DisplacementField> displacements; // steps + 1 states
  std::vector<std::vector<Vec3>> velocities;    // velocity after each state's update
};

/// Semi-implicit Euler on the spring network:
///   v <- v + dt (F_spring + F_ext - c v) / m,  x <- x + dt v.
/// Fixed nodes and displacement-loaded nodes do not move; the latter are
/// placed at their prescribed offset before the first step.
/// Throws NonFiniteState(step) and InvalidArgument on dt <= 0.
Trajectory dynamic_simulate(const MechanicalSystem& system, const LoadSet& loads, double dt,
                            std::size_t steps);

/// Same integration, keeping only the last state.
DisplacementField final_displacement(const MechanicalSystem& system, const LoadSet& loads,
                                     double dt, std::size_t steps);

/// Spring forces on every node at the given positions.
std::vector<Vec3> spring_forces(const MechanicalSystem& system, const std::vector<Vec3>& x);

/// Potential energy stored in the springs.
double spring_energy(const MechanicalSystem& system, const std::vector<Vec3>& x);

/// Outer faces of the tetrahedra (faces used by exactly one element), wound
/// outward, positions converted from metres to millimetres. Vertices are the
/// nodes touched by an outer face, in node order.
SurfaceMesh model_surface(const PhysicalModel& model, const DisplacementField* u = nullptr);

} // namespace camikit::biomech
