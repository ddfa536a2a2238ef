#include "camikit/biomech/evaluation.hpp"

#include "camikit/error.hpp"
#include "camikit/formats/xml.hpp"
#include "camikit/text.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace camikit::biomech {

double rms_error(const DisplacementField& a, const DisplacementField& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " nodes");
  if (a.empty())
    return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 d = a[i] - b[i];
    acc += dot(d, d);
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

// Region tests from Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0)
    return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3)
    return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0)
    return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6)
    return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0)
    return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // collinear corners: fall back to the nearest of the three edges
    auto on_segment = [&](const Vec3& s, const Vec3& e) {
      const Vec3 se = e - s;
      const double l2 = dot(se, se);
      const double t = l2 > 0 ? std::clamp(dot(p - s, se) / l2, 0.0, 1.0) : 0.0;
      return s + t * se;
    };
    Vec3 best = on_segment(a, b);
    for (const Vec3& q : {on_segment(b, c), on_segment(c, a)})
      if (norm(p - q) < norm(p - best))
        best = q;
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return a + v * ab + w * ac;
}

Deviation geometric_deviation(const SurfaceMesh& m, const SurfaceMesh& ref) {
  if (ref.triangles.empty())
    throw Error(ErrorCode::EmptyReference, "reference mesh has no triangles");
  Deviation d;
  d.distances.reserve(m.vertices.size());
  for (const auto& p : m.vertices) {
    double best = INFINITY;
    for (const auto& t : ref.triangles) {
      const Vec3 q =
        closest_point_on_triangle(p, ref.vertices[t[0]], ref.vertices[t[1]], ref.vertices[t[2]]);
      best = std::min(best, norm(p - q));
    }
    d.distances.push_back(best);
  }
  if (d.distances.empty())
    return d;
  double sum = 0;
  for (double x : d.distances) {
    sum += x;
    d.max = std::max(d.max, x);
  }
  d.mean = sum / static_cast<double>(d.distances.size());
  double sq = 0;
  for (double x : d.distances)
    sq += (x - d.mean) * (x - d.mean);
  d.std = std::sqrt(sq / static_cast<double>(d.distances.size()));
  return d;
}

namespace {

std::string system_hash(const MechanicalSystem& system, const LoadSet& loads) {
  std::string bytes = formats::write_xml(formats::to_xml(system.geometry)) +
                      formats::write_xml(formats::to_xml(loads));
  const auto& m = system.material;
  for (double x : {m.E, m.nu, m.density, m.spring_stiffness, m.damping})
    bytes += text::format_double(x) + ";";
  std::uint64_t h = 1469598103934665603ULL; // FNV-1a
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SurfaceMesh deformed_points(const PhysicalModel& model, const DisplacementField& u) {
  if (!model.tetrahedra.empty())
    return model_surface(model, &u);
  SurfaceMesh pts;
  for (std::size_t i = 0; i < model.nodes.size(); ++i)
    pts.vertices.push_back((model.nodes[i] + u[i]) * 1000.0);
  return pts;
}

} // namespace

MetricsReport run_experiment(const MechanicalSystem& system, const LoadSet& loads,
                             const MonitoringSpec& spec, const SurfaceMesh* reference) {
  if (spec.metrics.empty())
    throw Error(ErrorCode::SchemaError, "/monitoring: no metric requested");
  if (spec.wants(Metric::geometric_deviation) && !reference)
    throw Error(ErrorCode::EmptyReference, "geometric_deviation needs a reference mesh");

  MetricsReport r;
  r.metrics = spec.metrics;
  r.system_hash = system_hash(system, loads);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (system.mode == SimulationMode::static_fem) {
    auto sol = static_solve(system, loads);
    r.displacement = std::move(sol.u);
    r.solver_iterations = sol.iterations;
    r.residual = sol.residual;
  } else {
    r.displacement = final_displacement(system, loads, spec.simulation.dt, spec.simulation.steps);
    r.solver_iterations = spec.simulation.steps;
  }
  const double elapsed =
    std::chrono::duration<double, std::milli>(clock::now() - t0).count();

  if (spec.wants(Metric::rms_displacement))
    r.rms_displacement = rms_error(r.displacement, DisplacementField(r.displacement.size()));
  if (spec.wants(Metric::max_displacement)) {
    double mx = 0;
    for (const auto& u : r.displacement)
      mx = std::max(mx, norm(u));
    r.max_displacement = mx;
  }
  if (spec.wants(Metric::geometric_deviation))
    r.deviation = geometric_deviation(deformed_points(system.geometry, r.displacement), *reference);
  if (spec.wants(Metric::computing_time))
    r.computing_time_ms = elapsed;
  return r;
}

nlohmann::json to_json(const MetricsReport& r, bool include_field) {
  nlohmann::json metrics = nlohmann::json::object();
  if (r.rms_displacement)
    metrics["rms_displacement"] = {{"value", *r.rms_displacement}, {"units", "m"}};
  if (r.max_displacement)
    metrics["max_displacement"] = {{"value", *r.max_displacement}, {"units", "m"}};
  if (r.deviation)
    metrics["geometric_deviation"] = {{"mean", r.deviation->mean},
                                      {"max", r.deviation->max},
                                      {"std", r.deviation->std},
                                      {"per_vertex", r.deviation->distances},
                                      {"units", "mm"}};
  if (r.computing_time_ms)
    metrics["computing_time"] = {{"value", *r.computing_time_ms}, {"units", "ms"}};
  nlohmann::json j = {{"metrics", metrics},
                      {"metadata",
                       {{"system_hash", r.system_hash},
                        {"solver_iterations", r.solver_iterations},
                        {"residual", r.residual},
                        {"std_of", "per-vertex geometric deviation distances"}}}};
  if (include_field) {
    auto field = nlohmann::json::array();
    for (const auto& u : r.displacement)
      field.push_back({u.x, u.y, u.z});
    j["displacement"] = std::move(field);
  }
  return j;
}

std::string_view to_string(SweepParam p) noexcept {
  switch (p) {
  case SweepParam::E:
    return "E";
  case SweepParam::spring_stiffness:
    return "spring_stiffness";
  case SweepParam::damping:
    return "damping";
  case SweepParam::dt:
    return "dt";
  }
  return "?";
}

std::optional<SweepParam> sweep_param_from_string(std::string_view name) noexcept {
  for (auto p : {SweepParam::E, SweepParam::spring_stiffness, SweepParam::damping, SweepParam::dt})
    if (to_string(p) == name)
      return p;
  return std::nullopt;
}

SweepGrid parse_grid_csv(std::string_view text_in) {
  std::vector<std::string_view> lines;
  for (auto line : text::split(text_in, '\n')) {
    auto t = text::trim(line);
    if (!t.empty())
      lines.push_back(t);
  }
  if (lines.empty())
    throw Error(ErrorCode::BadGrid, "grid file is empty");
  SweepGrid grid;
  for (auto name : text::split(lines[0], ',')) {
    auto p = sweep_param_from_string(text::trim(name));
    if (!p)
      throw Error(ErrorCode::BadGrid, "unknown grid parameter '" + std::string(text::trim(name)) + "'", 1);
    for (const auto& axis : grid)
      if (axis.param == *p)
        throw Error(ErrorCode::BadGrid, "parameter '" + std::string(to_string(*p)) + "' repeats", 1);
    grid.push_back({*p, {}});
  }
  std::vector<bool> ended(grid.size(), false);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    auto cells = text::split(lines[l], ',');
    if (cells.size() > grid.size())
      throw Error(ErrorCode::MalformedRecord, "more cells than parameters", l + 1);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      auto cell = c < cells.size() ? text::trim(cells[c]) : std::string_view{};
      if (cell.empty()) {
        ended[c] = true;
        continue;
      }
      if (ended[c])
        throw Error(ErrorCode::MalformedRecord, "value after a blank cell", l + 1);
      auto v = text::parse_double(cell);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::MalformedRecord, "'" + std::string(cell) + "' is not a number", l + 1);
      grid[c].values.push_back(*v);
    }
  }
  for (const auto& axis : grid)
    if (axis.values.empty())
      throw Error(ErrorCode::BadGrid, "parameter '" + std::string(to_string(axis.param)) +
                                        "' has no values");
  return grid;
}

std::vector<SweepRow> sweep(const PhysicalModel& geometry, const MaterialSpec& material,
                            const LoadSet& loads, const MonitoringSpec& spec,
                            const SweepGrid& grid, const SurfaceMesh* reference) {
  if (grid.empty())
    throw Error(ErrorCode::BadGrid, "grid has no axes");
  std::size_t total = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty())
      throw Error(ErrorCode::BadGrid, "axis '" + std::string(to_string(axis.param)) + "' is empty");
    total *= axis.values.size();
  }
  std::vector<SweepRow> rows;
  rows.reserve(total);
  for (std::size_t n = 0; n < total; ++n) {
    SweepRow row;
    row.point.resize(grid.size());
    std::size_t rest = n;
    for (std::size_t a = grid.size(); a-- > 0;) {
      row.point[a] = grid[a].values[rest % grid[a].values.size()];
      rest /= grid[a].values.size();
    }
    MaterialSpec mat = material;
    MonitoringSpec s = spec;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      switch (grid[a].param) {
      case SweepParam::E:
        mat.E = row.point[a];
        break;
      case SweepParam::spring_stiffness:
        mat.spring_stiffness = row.point[a];
        break;
      case SweepParam::damping:
        mat.damping = row.point[a];
        break;
      case SweepParam::dt:
        s.simulation.dt = row.point[a];
        break;
      }
    }
    try {
      const auto system = make_system(geometry, mat, s.simulation.mode);
      row.report = run_experiment(system, loads, s, reference);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

std::string sweep_to_csv(const SweepGrid& grid, const MonitoringSpec& spec,
                         const std::vector<SweepRow>& rows) {
  std::vector<std::string> header;
  for (const auto& axis : grid)
    header.emplace_back(to_string(axis.param));
  header.emplace_back("status");
  for (auto m : spec.metrics) {
    switch (m) {
    case Metric::rms_displacement:
      header.emplace_back("rms_displacement_m");
      break;
    case Metric::max_displacement:
      header.emplace_back("max_displacement_m");
      break;
    case Metric::geometric_deviation:
      for (const char* h : {"geometric_deviation_mean_mm", "geometric_deviation_max_mm",
                            "geometric_deviation_std_mm"})
        header.emplace_back(h);
      break;
    case Metric::computing_time:
      header.emplace_back("computing_time_ms");
      break;
    }
  }
  header.emplace_back("error");

  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (double v : row.point)
      cells.push_back(text::format_double(v));
    cells.emplace_back(row.ok ? "ok" : "failed");
    auto num = [&](std::optional<double> v) {
      cells.push_back(row.ok && v ? text::format_double(*v) : std::string());
    };
    const MetricsReport* r = row.report ? &*row.report : nullptr;
    for (auto m : spec.metrics) {
      switch (m) {
      case Metric::rms_displacement:
        num(r ? r->rms_displacement : std::nullopt);
        break;
      case Metric::max_displacement:
        num(r ? r->max_displacement : std::nullopt);
        break;
      case Metric::geometric_deviation:
        num(r && r->deviation ? std::optional(r->deviation->mean) : std::nullopt);
        num(r && r->deviation ? std::optional(r->deviation->max) : std::nullopt);
        num(r && r->deviation ? std::optional(r->deviation->std) : std::nullopt);
        break;
      case Metric::computing_time:
        num(r ? r->computing_time_ms : std::nullopt);
        break;
      }
    }
    cells.push_back(csv_cell(row.error));
    for (std::size_t i = 0; i < cells.size(); ++i)
      out += (i ? "," : "") + cells[i];
    out += '\n';
  }
  return out;
}

} // namespace camikit::biomech
