#pragma once

namespace globtop {

/// Spherical cap cut from a sphere of radius a by a plane.
///
/// All lengths in metres, the base angle in radians. A cap is always
/// constructed through solve_cap() or from_radius_angle(), so both cap
/// identities b = a sin(alpha) and h = a (1 - cos(alpha)) hold.
class CapGeometry {
 public:
  double base_half_width() const { return base_half_width_; }
  double rise() const { return rise_; }
  double radius() const { return radius_; }
  double base_angle() const { return base_angle_; }
  double base_angle_deg() const;

  /// Meridian arc length from apex to rim, a * alpha.
  double arc_length() const { return radius_ * base_angle_; }

  static CapGeometry from_radius_angle(double radius_m, double base_angle_deg);

 private:
  friend CapGeometry solve_cap(double, double);
  CapGeometry(double b, double h, double a, double alpha)
      : base_half_width_(b), rise_(h), radius_(a), base_angle_(alpha) {}

  double base_half_width_;
  double rise_;
  double radius_;
  double base_angle_;
};

/// Solve radius and base angle from base half-width b and rise h.
/// Requires 0 < h <= b (shallow cap up to a hemisphere).
CapGeometry solve_cap(double base_half_width_m, double rise_m);

/// Rounded reference cap (a = 3010 um, alpha = 23.5 deg) used for all
/// table reproductions.
CapGeometry reference_cap();

/// The 2400 um wide, 250 um high dome that reference_cap() rounds.
CapGeometry exact_reference_cap();

inline constexpr double kThinShellRatioLimit = 0.1;

struct ThinnessRatio {
  double ratio;  // t / a
  bool warning;  // t / a above kThinShellRatioLimit
};

ThinnessRatio thinness_ratio(const CapGeometry& geom, double thickness_m);

}  // namespace globtop
