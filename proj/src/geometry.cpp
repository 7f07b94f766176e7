#include "globtop/geometry.hpp"

#include <cmath>

#include <fmt/format.h>

#include "globtop/error.hpp"
#include "globtop/units.hpp"

namespace globtop {

namespace {

void require_positive_finite(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DomainError(fmt::format("{} must be positive and finite (got {})", what, value));
  }
}

}  // namespace

double CapGeometry::base_angle_deg() const { return units::rad_to_deg(base_angle_); }

CapGeometry CapGeometry::from_radius_angle(double radius_m, double base_angle_deg) {
  require_positive_finite(radius_m, "cap radius");
  require_positive_finite(base_angle_deg, "cap base angle");
  if (base_angle_deg > 90.0) {
    throw DomainError(fmt::format("cap base angle must not exceed 90 deg (got {})", base_angle_deg));
  }
  const double alpha = units::deg_to_rad(base_angle_deg);
  const double half = std::sin(0.5 * alpha);
  // 1 - cos(alpha) written as 2 sin^2(alpha/2) to keep shallow caps accurate.
  return CapGeometry(radius_m * std::sin(alpha), 2.0 * radius_m * half * half, radius_m, alpha);
}

CapGeometry solve_cap(double base_half_width_m, double rise_m) {
  require_positive_finite(base_half_width_m, "cap base half-width");
  require_positive_finite(rise_m, "cap rise");
  if (rise_m > base_half_width_m) {
    throw DomainError(fmt::format("shallow-cap violation: rise {:.6g} um exceeds base half-width {:.6g} um",
                                  units::m_to_um(rise_m), units::m_to_um(base_half_width_m)));
  }
  const double b = base_half_width_m;
  const double h = rise_m;
  const double a = (b * b + h * h) / (2.0 * h);
  // tan(alpha/2) = h/b; exact pi/2 at the hemisphere.
  const double alpha = 2.0 * std::atan2(h, b);
  return CapGeometry(b, h, a, alpha);
}

CapGeometry reference_cap() { return CapGeometry::from_radius_angle(units::um_to_m(3010.0), 23.5); }

CapGeometry exact_reference_cap() { return solve_cap(units::um_to_m(1200.0), units::um_to_m(250.0)); }

ThinnessRatio thinness_ratio(const CapGeometry& geom, double thickness_m) {
  require_positive_finite(thickness_m, "shell thickness");
  const double ratio = thickness_m / geom.radius();
  return {ratio, ratio > kThinShellRatioLimit};
}

}  // namespace globtop
