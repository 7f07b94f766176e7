#include "globtop/shell_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "globtop/error.hpp"
#include "globtop/units.hpp"

namespace globtop {

namespace {

// Accepts a few ulps of overshoot at the rim (e.g. alpha * i / n with i = n)
// and returns the angle clamped to [0, alpha].
double checked_angle(const ShellCase& c, double phi) {
  const double alpha = c.geometry().base_angle();
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * alpha;
  if (!(phi >= 0.0 && phi <= alpha + slack)) {
    throw DomainError(fmt::format("polar angle {} rad outside [0, {}]", phi, alpha));
  }
  return std::min(phi, alpha);
}

// 1/(1+cos a) - 1/(1+cos phi) + ln((1+cos phi)/(1+cos a)), evaluated through
// x = (cos phi - cos a)/(1 + cos a) so that phi -> alpha loses no digits.
double meridional_bracket(double phi, double alpha) {
  const double cos_alpha = std::cos(alpha);
  const double cos_diff = -2.0 * std::sin(0.5 * (phi + alpha)) * std::sin(0.5 * (phi - alpha));
  const double x = cos_diff / (1.0 + cos_alpha);
  return x / ((1.0 + cos_alpha) * (1.0 + x)) + std::log1p(x);
}

}  // namespace

ShellCase::ShellCase(CapGeometry geometry, double thickness_m, Material material, double pressure_pa)
    : geometry_(geometry),
      thickness_(thickness_m),
      material_(std::move(material)),
      pressure_(pressure_pa),
      thin_shell_warning_(false) {
  if (!std::isfinite(pressure_pa) || pressure_pa < 0.0) {
    throw DomainError(fmt::format("pressure must be finite and non-negative (got {})", pressure_pa));
  }
  try {
    validate(material_);
  } catch (const ValidationError& e) {
    throw DomainError(e.what());
  }
  thin_shell_warning_ = thinness_ratio(geometry_, thickness_m).warning;
}

double ShellCase::load_scale() const {
  const double a = geometry_.radius();
  return a * a * pressure_ / (material_.youngs_modulus() * thickness_);
}

ShellCase ShellCase::with_pressure(double pressure_pa) const {
  return ShellCase(geometry_, thickness_, material_, pressure_pa);
}

ShellCase ShellCase::with_thickness(double thickness_m) const {
  return ShellCase(geometry_, thickness_m, material_, pressure_);
}

double apex_factor(double nu, double alpha) {
  const double one_plus_cos = 1.0 + std::cos(alpha);
  return (1.0 + nu) * (1.0 / one_plus_cos - 0.5 + std::log(2.0 / one_plus_cos)) + 1.0 -
         0.5 * (1.0 + nu);
}

double meridional_v(const ShellCase& c, double phi) {
  phi = checked_angle(c, phi);
  const double nu = c.material().poisson_ratio;
  return c.load_scale() * (1.0 + nu) * meridional_bracket(phi, c.geometry().base_angle()) *
         std::sin(phi);
}

double radial_w(const ShellCase& c, double phi) {
  phi = checked_angle(c, phi);
  const double nu = c.material().poisson_ratio;
  if (phi == 0.0) {
    return c.load_scale() * apex_factor(nu, c.geometry().base_angle());
  }
  // v cot(phi) with the sin(phi) factor of v cancelled analytically.
  const double cos_phi = std::cos(phi);
  const double v_cot = (1.0 + nu) * meridional_bracket(phi, c.geometry().base_angle()) * cos_phi;
  return c.load_scale() * (v_cot - ((1.0 + nu) / (1.0 + cos_phi) - cos_phi));
}

double apex_deflection(const ShellCase& c) { return std::abs(radial_w(c, 0.0)); }

DeflectionProfile profile(const ShellCase& c, std::size_t n_samples) {
  if (n_samples < 2) {
    throw DomainError(fmt::format("profile needs at least 2 samples (got {})", n_samples));
  }
  const double alpha = c.geometry().base_angle();
  DeflectionProfile p;
  p.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double phi = i + 1 == n_samples ? alpha : alpha * static_cast<double>(i) / (n_samples - 1);
    p.samples.push_back({phi, meridional_v(c, phi), radial_w(c, phi)});
  }
  p.apex_w = p.samples.front().w;
  return p;
}

std::string profile_csv(const DeflectionProfile& p) {
  std::string out = "phi_deg,v_um,w_um\n";
  for (const auto& s : p.samples) {
    out += fmt::format("{:.6f},{:.6f},{:.6f}\n", units::rad_to_deg(s.phi), units::m_to_um(s.v),
                       units::m_to_um(s.w));
  }
  return out;
}

}  // namespace globtop
