#include "camikit/biomech/elasticity.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <cmath>
#include <limits>

namespace camikit::biomech {

double forward_height(double p, double E, double aperture_mm, double phi) noexcept {
  return phi * aperture_mm * p / E;
}

namespace {

void check_increasing(const std::vector<double>& xs, const char* what) {
  if (xs.empty())
    throw Error(ErrorCode::BadGrid, std::string(what) + " list is empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !std::isfinite(xs[i]))
      throw Error(ErrorCode::BadGrid, std::string(what) + "[" + std::to_string(i) +
                                        "] is not positive");
    if (i && !(xs[i] > xs[i - 1]))
      throw Error(ErrorCode::BadGrid, std::string(what) + " values are not strictly increasing at " +
                                        std::to_string(i));
  }
}

double residual(const std::vector<double>& measured, const std::vector<double>& model) {
  double r = 0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const double d = measured[k] - model[k];
    r += d * d;
  }
  return r;
}

} // namespace

DeformationLibrary build_library(const std::vector<double>& E_values,
                                 const std::vector<double>& pressures, double aperture_mm,
                                 double phi) {
  check_increasing(E_values, "E");
  check_increasing(pressures, "pressure");
  if (!(aperture_mm > 0) || !std::isfinite(aperture_mm))
    throw Error(ErrorCode::BadGrid, "aperture must be positive");
  if (!(phi > 0) || !std::isfinite(phi))
    throw Error(ErrorCode::BadGrid, "phi must be positive");
  DeformationLibrary lib;
  lib.pressures = pressures;
  lib.aperture_mm = aperture_mm;
  lib.phi = phi;
  for (double E : E_values) {
    LibraryEntry e;
    e.E = E;
    for (double p : pressures)
      e.heights.push_back(forward_height(p, E, aperture_mm, phi));
    lib.entries.push_back(std::move(e));
  }
  return lib;
}

ElasticityEstimate estimate_elasticity(const AspirationCurve& measured,
                                       const DeformationLibrary& lib) {
  if (lib.entries.empty())
    throw Error(ErrorCode::EmptyLibrary, "library has no entries");
  if (measured.pressures.size() != lib.pressures.size() ||
      measured.heights.size() != measured.pressures.size())
    throw Error(ErrorCode::GridMismatch, "measured curve has " +
                                           std::to_string(measured.pressures.size()) +
                                           " samples, library grid has " +
                                           std::to_string(lib.pressures.size()));
  for (std::size_t k = 0; k < lib.pressures.size(); ++k)
    if (std::abs(measured.pressures[k] - lib.pressures[k]) >
        1e-9 * std::abs(lib.pressures[k]))
      throw Error(ErrorCode::GridMismatch, "pressure " + std::to_string(k) + " differs");

  const auto& h = measured.heights;
  ElasticityEstimate best;
  best.residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lib.entries.size(); ++i) {
    const double r = residual(h, lib.entries[i].heights);
    if (r < best.residual) {
      best.residual = r;
      best.best_entry = i;
    }
  }
  best.E = lib.entries[best.best_entry].E;

  // refine on both neighbouring segments, keep the better one
  auto refine = [&](std::size_t lo) {
    const auto& a = lib.entries[lo];
    const auto& b = lib.entries[lo + 1];
    double num = 0, den = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double step = b.heights[k] - a.heights[k];
      num += (h[k] - a.heights[k]) * step;
      den += step * step;
    }
    double w = den > 0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
    std::vector<double> curve(h.size());
    for (std::size_t k = 0; k < h.size(); ++k)
      curve[k] = (1 - w) * a.heights[k] + w * b.heights[k];
    ElasticityEstimate e;
    e.best_entry = best.best_entry;
    e.weight = w;
    e.residual = residual(h, curve);
    e.E = w == 0 ? a.E : w == 1 ? b.E : 1.0 / ((1 - w) / a.E + w / b.E);
    return e;
  };
  ElasticityEstimate result = best;
  bool refined = false;
  for (std::size_t lo : {best.best_entry - 1, best.best_entry}) {
    if (lo + 1 == 0 || lo + 1 >= lib.entries.size())
      continue;
    const auto e = refine(lo);
    if (!refined || e.residual < result.residual) {
      result = e;
      refined = true;
    }
  }
  return result;
}

AspirationCurve parse_curve_csv(std::string_view in) {
  AspirationCurve c;
  std::size_t line_no = 0;
  bool header = true;
  for (auto raw : text::split(in, '\n')) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    auto cells = text::split(line, ',');
    if (cells.size() != 2)
      throw Error(ErrorCode::MalformedRecord, "expected two columns", line_no);
    if (header) {
      header = false;
      if (!text::parse_double(text::trim(cells[0])))
        continue; // column names
    }
    auto p = text::parse_double(text::trim(cells[0]));
    auto h = text::parse_double(text::trim(cells[1]));
    if (!p || !h || !std::isfinite(*p) || !std::isfinite(*h))
      throw Error(ErrorCode::MalformedRecord, "not a number", line_no);
    if (*h < 0)
      throw Error(ErrorCode::MalformedRecord, "negative height", line_no);
    c.pressures.push_back(*p);
    c.heights.push_back(*h);
  }
  check_increasing(c.pressures, "pressure");
  return c;
}

std::string curve_to_csv(const AspirationCurve& curve) {
  std::string out = "pressure_pa,height_mm\n";
  for (std::size_t k = 0; k < curve.pressures.size(); ++k)
    out += text::format_double(curve.pressures[k]) + "," + text::format_double(curve.heights[k]) + "\n";
  return out;
}

} // namespace camikit::biomech
