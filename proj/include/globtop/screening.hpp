#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "globtop/doe.hpp"
#include "globtop/fem.hpp"
#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"
#include "globtop/stats.hpp"

namespace globtop {

struct Range {
  double lo;
  double hi;
};

/// Screening limits, SI units.
struct ScreeningCriteria {
  double deflection_limit = 5e-6;
  double max_pressure = 100.0 * units::kStandardAtmospherePa;
  double max_thickness = 250e-6;
  Range thickness_range{150e-6, 250e-6};
  Range pressure_range{80.0 * units::kStandardAtmospherePa, 100.0 * units::kStandardAtmospherePa};
  /// Half-width of the marginal band around max_thickness, as a fraction.
  double marginal_band = 0.05;

  void validate() const;
};

enum class VerdictSource { analytical, fem, external_fit };
enum class Classification { pass, marginal, fail };

std::string_view to_string(VerdictSource source);
std::string_view to_string(Classification c);

struct Verdict {
  std::string material;
  VerdictSource source = VerdictSource::analytical;
  std::optional<double> min_feasible_thickness;  // m; empty when infeasible
  double worst_case_deflection = 0.0;            // m, at (max_thickness, max_pressure)
  Classification classification = Classification::fail;
};

/// Closed-form inverse of the apex deflection: a^2 P K(nu, alpha) / (E limit).
double min_thickness(const Material& material, const CapGeometry& geom, double pressure_pa,
                     double limit_m);

/// Classification of a minimum thickness against max_thickness.
Classification classify(const std::optional<double>& min_thickness_m, const ScreeningCriteria& criteria);

struct FemSettings {
  std::size_t elements = 128;
  fem::RimCondition bc = fem::RimCondition::clamped;
};

struct ScreeningInputs {
  VerdictSource source = VerdictSource::analytical;
  FemSettings fem;
  const LinearModelFit* fit = nullptr;  // required for external_fit
  units::PressureScale scale;           // unit convention the fit was made in
};

/// One verdict per material, ordered by ascending minimum thickness
/// (infeasible last, ties by name). For external_fit only the materials
/// that are levels of the fit are screened.
std::vector<Verdict> screen(const MaterialLibrary& library, const CapGeometry& geom,
                            const ScreeningCriteria& criteria, const ScreeningInputs& inputs);

/// Best material: the pass with the smallest minimum thickness, if any.
std::optional<Verdict> best(std::span<const Verdict> verdicts);

/// Smaller-is-better ramp: 1 at or below target, 0 at or above bound.
double desirability(double w, double lower_target, double upper_bound);

struct ThicknessPoint {
  double thickness;     // m
  double deflection;    // m, analytical apex
  double desirability;  // against [0, limit]
};

std::vector<ThicknessPoint> thickness_profile(const Material& material, const CapGeometry& geom,
                                              double pressure_pa, Range thickness_range, std::size_t n,
                                              double limit_m);

std::string verdicts_csv(std::span<const Verdict> verdicts);
std::string verdicts_json(std::span<const Verdict> verdicts);
std::string thickness_profile_csv(std::span<const ThicknessPoint> curve);

/// Line plot: thickness (um) against deflection (um) with a horizontal
/// rule at the limit.
std::string thickness_profile_svg(std::span<const ThicknessPoint> curve, double limit_m,
                                  std::string_view title);

}  // namespace globtop
