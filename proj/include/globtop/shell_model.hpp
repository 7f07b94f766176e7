#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"

namespace globtop {

/// One load case: cap, shell thickness, material and uniform pressure.
/// SI units throughout (m, Pa).
class ShellCase {
 public:
  /// Throws DomainError for t <= 0, P < 0 or non-finite inputs.
  ShellCase(CapGeometry geometry, double thickness_m, Material material, double pressure_pa);

  const CapGeometry& geometry() const { return geometry_; }
  double thickness() const { return thickness_; }
  const Material& material() const { return material_; }
  double pressure() const { return pressure_; }

  /// t/a exceeds the thin-shell limit; the model is still evaluated.
  bool thin_shell_warning() const { return thin_shell_warning_; }

  /// Membrane scale a^2 P / (E t), the common factor of v and w.
  double load_scale() const;

  ShellCase with_pressure(double pressure_pa) const;
  ShellCase with_thickness(double thickness_m) const;

 private:
  CapGeometry geometry_;
  double thickness_;
  Material material_;
  double pressure_;
  bool thin_shell_warning_;
};

/// Apex factor K(nu, alpha) with w(0) = (a^2 P / E t) K.
double apex_factor(double poisson_ratio, double base_angle_rad);

/// Meridional displacement v at polar angle phi (rad), 0 <= phi <= alpha.
double meridional_v(const ShellCase& c, double phi);

/// Normal displacement w at polar angle phi (rad); positive toward the
/// centre of curvature. phi = 0 uses the closed-form apex limit.
double radial_w(const ShellCase& c, double phi);

/// |w(0)|, the quantity screened against the deflection limit.
double apex_deflection(const ShellCase& c);

struct ProfileSample {
  double phi;  // rad
  double v;    // m
  double w;    // m, signed
};

struct DeflectionProfile {
  std::vector<ProfileSample> samples;
  double apex_w;  // m, equal to samples.front().w
};

/// Uniform sampling of [0, alpha] with n_samples >= 2 points.
DeflectionProfile profile(const ShellCase& c, std::size_t n_samples);

/// CSV with columns phi_deg, v_um, w_um.
std::string profile_csv(const DeflectionProfile& p);

}  // namespace globtop
