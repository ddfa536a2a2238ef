#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace camikit::biomech {

/// Height (mm) against aspiration pressure magnitude (Pa).
struct AspirationCurve {
  std::vector<double> pressures;
  std::vector<double> heights;
};

struct LibraryEntry {
  double E = 0; // Pa
  std::vector<double> heights;
};

struct DeformationLibrary {
  std::vector<double> pressures; // shared grid
  std::vector<LibraryEntry> entries;
  double aperture_mm = 1.0;
  double phi = 1.0;
};

/// h = phi * a * p / E. p and E share a unit, so the ratio is unitless.
double forward_height(double p, double E, double aperture_mm, double phi) noexcept;

/// Throws BadGrid unless E values and pressures are positive and strictly
/// increasing and aperture and phi are positive.
DeformationLibrary build_library(const std::vector<double>& E_values,
                                 const std::vector<double>& pressures, double aperture_mm,
                                 double phi = 1.0);

struct ElasticityEstimate {
  double E = 0; // Pa
  double residual = 0;
  std::size_t best_entry = 0;
  double weight = 0; // interpolation weight inside the refined segment
};

/// Nearest library entry by summed squared height residual, refined on the
/// neighbouring segments by a clamped one-dimensional least-squares weight.
/// Interpolation runs in compliance (1/E), which the forward model is
/// linear in. Throws EmptyLibrary or GridMismatch.
ElasticityEstimate estimate_elasticity(const AspirationCurve& measured,
                                       const DeformationLibrary& lib);

/// Two columns "pressure_pa,height_mm" with a header row.
AspirationCurve parse_curve_csv(std::string_view text);
std::string curve_to_csv(const AspirationCurve& curve);

} // namespace camikit::biomech
