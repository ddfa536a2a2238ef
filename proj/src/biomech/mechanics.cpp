#include "camikit/biomech/mechanics.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace camikit::biomech {

namespace {

[[noreturn]] void invalid_material(const std::string& why) {
  throw Error(ErrorCode::InvalidMaterial, why);
}

[[noreturn]] void invalid_system(const std::string& why) {
  throw Error(ErrorCode::InvalidSystem, why);
}

double tet_volume(const PhysicalModel& g, const std::array<std::size_t, 4>& t) {
  return tetra_signed_volume6(g.nodes[t[0]], g.nodes[t[1]], g.nodes[t[2]], g.nodes[t[3]]) / 6.0;
}

} // namespace

void validate_material(const MaterialSpec& m) {
  if (!(m.E > 0) || !std::isfinite(m.E))
    invalid_material("E must be positive");
  if (!(m.nu > -1.0 && m.nu < 0.5))
    invalid_material("nu must lie in (-1, 0.5)");
  if (!(m.density > 0) || !std::isfinite(m.density))
    invalid_material("density must be positive");
  if (!(m.spring_stiffness >= 0) || !std::isfinite(m.spring_stiffness))
    invalid_material("spring_stiffness must be non-negative");
  if (!(m.damping >= 0) || !std::isfinite(m.damping))
    invalid_material("damping must be non-negative");
}

MaterialSpec material_from(const MaterialRef& ref) {
  MaterialSpec m;
  for (const auto& [key, value] : ref.properties) {
    if (key == "E")
      m.E = value;
    else if (key == "nu")
      m.nu = value;
    else if (key == "density")
      m.density = value;
    else if (key == "spring_stiffness")
      m.spring_stiffness = value;
    else if (key == "damping")
      m.damping = value;
    else
      invalid_material("unknown property " + key);
  }
  return m;
}

MechanicalSystem make_system(PhysicalModel geometry, const MaterialSpec& material,
                             SimulationMode mode) {
  validate_material(material);
  const std::size_t n = geometry.nodes.size();
  for (const auto& p : geometry.nodes)
    if (!is_finite(p))
      invalid_system("non-finite node position");
  for (const auto& t : geometry.tetrahedra)
    for (auto i : t)
      if (i >= n)
        invalid_system("tetra references node " + std::to_string(i));
  for (const auto& s : geometry.springs)
    for (auto i : s)
      if (i >= n)
        invalid_system("spring references node " + std::to_string(i));
  for (auto i : geometry.fixed_nodes)
    if (i >= n)
      invalid_system("fixed node " + std::to_string(i) + " does not exist");
  if (mode == SimulationMode::static_fem && geometry.tetrahedra.empty())
    invalid_system("static analysis needs at least one tetrahedron");
  if (mode == SimulationMode::dynamic_mass_spring && geometry.springs.empty())
    invalid_system("dynamic analysis needs at least one spring");

  MechanicalSystem sys;
  sys.material = material;
  sys.mode = mode;
  sys.masses.assign(n, 0.0);
  for (const auto& t : geometry.tetrahedra) {
    const double share = material.density * std::abs(tet_volume(geometry, t)) / 4.0;
    for (auto i : t)
      sys.masses[i] += share;
  }
  for (const auto& s : geometry.springs) {
    const double len = norm(geometry.nodes[s[1]] - geometry.nodes[s[0]]);
    const double share = material.density * len * kSpringSectionM2 / 2.0;
    sys.masses[s[0]] += share;
    sys.masses[s[1]] += share;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!(sys.masses[i] > 0)) {
      sys.masses[i] = kIsolatedNodeMassKg;
      sys.default_mass_nodes.push_back(i);
    }
  sys.geometry = std::move(geometry);
  return sys;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const noexcept {
  for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
    if (cols[k] == c)
      return values[k];
  return 0.0;
}

namespace {

using EigenMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Reduced {
  EigenMatrix K;
  Eigen::VectorXd f;
  std::vector<std::int64_t> free_index;
  std::vector<double> prescribed;
};

// 12x12 stiffness of a linear tetrahedron, dof order (node, axis).
std::array<std::array<double, 12>, 12> element_stiffness(const std::array<Vec3, 4>& x,
                                                         double lambda, double mu,
                                                         double volume) {
  const Mat3 J{{{x[1].x - x[0].x, x[2].x - x[0].x, x[3].x - x[0].x},
                {x[1].y - x[0].y, x[2].y - x[0].y, x[3].y - x[0].y},
                {x[1].z - x[0].z, x[2].z - x[0].z, x[3].z - x[0].z}}};
  const Mat3 Jinv = inverse(J, determinant(J));
  // shape function gradients: rows of Jinv for nodes 1..3, minus their sum for node 0
  std::array<Vec3, 4> g;
  for (int a = 1; a < 4; ++a)
    g[a] = {Jinv[a - 1][0], Jinv[a - 1][1], Jinv[a - 1][2]};
  g[0] = -(g[1] + g[2] + g[3]);

  std::array<std::array<double, 12>, 12> k{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          // K_aibj = V (lambda g_a,i g_b,j + mu g_a,j g_b,i + mu delta_ij g_a . g_b)
          double v = lambda * g[a][i] * g[b][j] + mu * g[a][j] * g[b][i];
          if (i == j)
            v += mu * dot(g[a], g[b]);
          k[3 * a + i][3 * b + j] = volume * v;
        }
  return k;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a)
      a = parent[a] = parent[parent[a]];
    return a;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

void check_constraints(const PhysicalModel& g, const std::vector<bool>& constrained) {
  const std::size_t n = g.nodes.size();
  std::vector<bool> in_tet(n, false);
  UnionFind uf(n);
  for (const auto& t : g.tetrahedra)
    for (int a = 0; a < 4; ++a) {
      in_tet[t[a]] = true;
      uf.join(t[0], t[a]);
    }
  for (std::size_t i = 0; i < n; ++i)
    if (!in_tet[i] && !constrained[i])
      throw Error(ErrorCode::NullspaceDetected,
                  "node " + std::to_string(i) + " is free but belongs to no tetrahedron");

  std::map<std::size_t, std::vector<std::size_t>> anchors;
  std::map<std::size_t, bool> has_free;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_tet[i])
      continue;
    const auto root = uf.find(i);
    if (constrained[i])
      anchors[root].push_back(i);
    else
      has_free[root] = true;
  }
  for (const auto& [root, free] : has_free) {
    if (!free)
      continue;
    const auto& pts = anchors[root];
    bool spans = false;
    if (pts.size() >= 3) {
      const Vec3 a = g.nodes[pts[0]];
      double scale = 0;
      for (auto i : pts)
        scale = std::max(scale, norm(g.nodes[i] - a));
      // find a second point away from a, then a third off the line
      std::size_t far = pts[0];
      for (auto i : pts)
        if (norm(g.nodes[i] - a) > norm(g.nodes[far] - a))
          far = i;
      const Vec3 dir = g.nodes[far] - a;
      for (auto i : pts)
        if (norm(cross(dir, g.nodes[i] - a)) > 1e-9 * scale * scale) {
          spans = true;
          break;
        }
    }
    if (!spans)
      throw Error(ErrorCode::NullspaceDetected,
                  "element group containing node " + std::to_string(root) +
                    " is not held by three non-collinear constrained nodes");
  }
}

Reduced reduce(const MechanicalSystem& sys, const LoadSet& loads) {
  if (sys.mode != SimulationMode::static_fem)
    invalid_system("system is not in static_fem mode");
  const auto& g = sys.geometry;
  formats::check_loads(loads, g);
  const std::size_t n = g.nodes.size();

  for (std::size_t e = 0; e < g.tetrahedra.size(); ++e)
    if (!(tet_volume(g, g.tetrahedra[e]) > 0))
      throw Error(ErrorCode::InvertedElement, "tetra " + std::to_string(e));

  std::vector<bool> constrained(n, false);
  std::vector<Vec3> value(n);
  for (auto i : g.fixed_nodes)
    constrained[i] = true;
  for (const auto& load : loads.loads) {
    if (load.type != LoadType::displacement)
      continue;
    for (auto i : load.targets) {
      if (constrained[i] && value[i] != load.vector)
        invalid_system("conflicting displacements on node " + std::to_string(i));
      constrained[i] = true;
      value[i] = load.vector;
    }
  }
  check_constraints(g, constrained);

  Reduced r;
  r.free_index.assign(3 * n, -1);
  r.prescribed.assign(3 * n, 0.0);
  std::int64_t next = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) {
      if (constrained[i])
        r.prescribed[3 * i + a] = value[i][a];
      else
        r.free_index[3 * i + a] = next++;
    }
  const auto unknowns = static_cast<Eigen::Index>(next);
  r.f = Eigen::VectorXd::Zero(unknowns);
  for (const auto& load : loads.loads) {
    if (load.type != LoadType::force)
      continue;
    for (auto i : load.targets)
      for (int a = 0; a < 3; ++a)
        if (r.free_index[3 * i + a] >= 0)
          r.f[r.free_index[3 * i + a]] += load.vector[a];
  }

  const auto& m = sys.material;
  const double lambda = m.E * m.nu / ((1 + m.nu) * (1 - 2 * m.nu));
  const double mu = m.E / (2 * (1 + m.nu));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.tetrahedra.size() * 144);
  for (const auto& t : g.tetrahedra) {
    const std::array<Vec3, 4> x{g.nodes[t[0]], g.nodes[t[1]], g.nodes[t[2]], g.nodes[t[3]]};
    const auto k = element_stiffness(x, lambda, mu, tet_volume(g, t));
    for (int p = 0; p < 12; ++p) {
      const auto row = r.free_index[3 * t[p / 3] + p % 3];
      if (row < 0)
        continue;
      for (int q = 0; q < 12; ++q) {
        const std::size_t dof = 3 * t[q / 3] + q % 3;
        const auto col = r.free_index[dof];
        if (col >= 0)
          triplets.emplace_back(row, col, k[p][q]);
        else
          r.f[row] -= k[p][q] * r.prescribed[dof];
      }
    }
  }
  r.K.resize(unknowns, unknowns);
  r.K.setFromTriplets(triplets.begin(), triplets.end());
  r.K.makeCompressed();
  return r;
}

} // namespace

AssembledSystem assemble_static(const MechanicalSystem& system, const LoadSet& loads) {
  auto r = reduce(system, loads);
  AssembledSystem out;
  out.K.n = static_cast<std::size_t>(r.K.rows());
  out.K.row_ptr.assign(r.K.outerIndexPtr(), r.K.outerIndexPtr() + r.K.rows() + 1);
  out.K.cols.assign(r.K.innerIndexPtr(), r.K.innerIndexPtr() + r.K.nonZeros());
  out.K.values.assign(r.K.valuePtr(), r.K.valuePtr() + r.K.nonZeros());
  out.f.assign(r.f.data(), r.f.data() + r.f.size());
  out.free_index = std::move(r.free_index);
  out.prescribed = std::move(r.prescribed);
  return out;
}

StaticSolution static_solve(const MechanicalSystem& system, const LoadSet& loads) {
  auto r = reduce(system, loads);
  const std::size_t n = system.geometry.nodes.size();
  StaticSolution sol;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(r.f.size());
  if (r.f.size() > 0 && r.f.norm() > 0) {
    Eigen::ConjugateGradient<EigenMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::IdentityPreconditioner>
      cg;
    cg.setTolerance(1e-8);
    cg.setMaxIterations(10 * r.f.size());
    cg.compute(r.K);
    x = cg.solve(r.f);
    sol.iterations = static_cast<std::size_t>(cg.iterations());
    sol.residual = (r.f - r.K * x).norm() / r.f.norm();
    if (cg.info() != Eigen::Success || !x.allFinite() || !(sol.residual <= 1e-8))
      throw Error(ErrorCode::SolverDiverged,
                  "residual " + text::format_double(sol.residual) + " after " +
                    std::to_string(sol.iterations) + " iterations");
  }
  sol.u.assign(n, Vec3{});
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) {
      const auto idx = r.free_index[3 * i + a];
      sol.u[i][a] = idx >= 0 ? x[idx] : r.prescribed[3 * i + a];
    }
  return sol;
}

std::vector<Vec3> spring_forces(const MechanicalSystem& system, const std::vector<Vec3>& x) {
  const auto& g = system.geometry;
  const double k = system.material.spring_stiffness;
  std::vector<Vec3> f(x.size());
  for (const auto& s : g.springs) {
    const double rest = norm(g.nodes[s[1]] - g.nodes[s[0]]);
    const Vec3 d = x[s[1]] - x[s[0]];
    const double len = norm(d);
    if (len == 0.0)
      continue;
    const Vec3 pull = (k * (len - rest) / len) * d;
    f[s[0]] += pull;
    f[s[1]] -= pull;
  }
  return f;
}

double spring_energy(const MechanicalSystem& system, const std::vector<Vec3>& x) {
  const auto& g = system.geometry;
  double e = 0;
  for (const auto& s : g.springs) {
    const double stretch = norm(x[s[1]] - x[s[0]]) - norm(g.nodes[s[1]] - g.nodes[s[0]]);
    e += 0.5 * system.material.spring_stiffness * stretch * stretch;
  }
  return e;
}

namespace {

template <typename OnState>
void integrate(const MechanicalSystem& system, const LoadSet& loads, double dt,
               std::size_t steps, OnState&& on_state) {
  if (system.mode != SimulationMode::dynamic_mass_spring)
    invalid_system("system is not in dynamic_mass_spring mode");
  if (!(dt > 0) || !std::isfinite(dt))
    throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const auto& g = system.geometry;
  formats::check_loads(loads, g);
  const std::size_t n = g.nodes.size();

  std::vector<bool> held(n, false);
  for (auto i : g.fixed_nodes)
    held[i] = true;
  std::vector<Vec3> x = g.nodes, v(n), ext(n);
  for (const auto& load : loads.loads)
    for (auto i : load.targets) {
      if (load.type == LoadType::displacement) {
        held[i] = true;
        x[i] = g.nodes[i] + load.vector;
      } else {
        ext[i] += load.vector;
      }
    }
  const double c = system.material.damping;
  on_state(std::size_t{0}, x, v);
  for (std::size_t step = 1; step <= steps; ++step) {
    const auto f = spring_forces(system, x);
    for (std::size_t i = 0; i < n; ++i) {
      if (held[i])
        continue;
      v[i] += (dt / system.masses[i]) * (f[i] + ext[i] - c * v[i]);
      x[i] += dt * v[i];
      if (!is_finite(x[i]) || !is_finite(v[i]))
        throw Error(ErrorCode::NonFiniteState,
                    "step " + std::to_string(step) + ", node " + std::to_string(i));
    }
    on_state(step, x, v);
  }
}

} // namespace

Trajectory dynamic_simulate(const MechanicalSystem& system, const LoadSet& loads, double dt,
                            std::size_t steps) {
  Trajectory t;
  const auto& x0 = system.geometry.nodes;
  integrate(system, loads, dt, steps,
            [&](std::size_t, const std::vector<Vec3>& x, const std::vector<Vec3>& v) {
              DisplacementField u(x.size());
              for (std::size_t i = 0; i < x.size(); ++i)
                u[i] = x[i] - x0[i];
              t.displacements.push_back(std::move(u));
              t.velocities.push_back(v);
            });
  return t;
}

DisplacementField final_displacement(const MechanicalSystem& system, const LoadSet& loads,
                                      double dt, std::size_t steps) {
  DisplacementField u;
  const auto& x0 = system.geometry.nodes;
  integrate(system, loads, dt, steps,
            [&](std::size_t step, const std::vector<Vec3>& x, const std::vector<Vec3>&) {
              if (step != steps)
                return;
              u.resize(x.size());
              for (std::size_t i = 0; i < x.size(); ++i)
                u[i] = x[i] - x0[i];
            });
  return u;
}

SurfaceMesh model_surface(const PhysicalModel& model, const DisplacementField* u) {
  std::map<std::array<std::size_t, 3>, std::pair<int, std::array<std::size_t, 3>>> faces;
  std::vector<std::array<std::size_t, 3>> order;
  for (const auto& t : model.tetrahedra) {
    const std::array<std::array<std::size_t, 3>, 4> f{{{t[0], t[2], t[1]},
                                                       {t[0], t[1], t[3]},
                                                       {t[0], t[3], t[2]},
                                                       {t[1], t[2], t[3]}}};
    for (const auto& face : f) {
      auto key = face;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.try_emplace(key, 0, face);
      if (inserted)
        order.push_back(key);
      ++it->second.first;
    }
  }
  std::vector<std::int64_t> remap(model.nodes.size(), -1);
  std::vector<std::array<std::size_t, 3>> outer;
  for (const auto& key : order) {
    const auto& [count, face] = faces.at(key);
    if (count == 1) {
      outer.push_back(face);
      for (auto i : face)
        remap[i] = 0;
    }
  }
  SurfaceMesh mesh;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    if (remap[i] < 0)
      continue;
    remap[i] = static_cast<std::int64_t>(mesh.vertices.size());
    Vec3 p = model.nodes[i];
    if (u)
      p += (*u)[i];
    mesh.vertices.push_back(p * 1000.0);
  }
  for (const auto& face : outer)
    mesh.triangles.push_back({static_cast<std::uint32_t>(remap[face[0]]),
                              static_cast<std::uint32_t>(remap[face[1]]),
                              static_cast<std::uint32_t>(remap[face[2]])});
  return mesh;
}

} // namespace camikit::biomech
