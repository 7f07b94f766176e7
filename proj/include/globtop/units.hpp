#pragma once

#include <numbers>

namespace globtop::units {

/// Standard atmosphere; the default atm to Pa conversion.
inline constexpr double kStandardAtmospherePa = 101325.0;

inline constexpr double kMicrometre = 1e-6;
inline constexpr double kGigapascal = 1e9;

constexpr double um_to_m(double um) { return um * kMicrometre; }
constexpr double m_to_um(double m) { return m / kMicrometre; }
constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Pressure conversion with a configurable atmosphere constant.
struct PressureScale {
  double atm_pa = kStandardAtmospherePa;

  constexpr double to_pa(double atm) const { return atm * atm_pa; }
  constexpr double to_atm(double pa) const { return pa / atm_pa; }
};

}  // namespace globtop::units
