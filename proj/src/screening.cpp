#include "globtop/screening.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "globtop/error.hpp"
#include "globtop/shell_model.hpp"
#include "globtop/svg.hpp"

namespace globtop {

namespace {

double fem_apex(const Material& material, const CapGeometry& geom, double thickness_m, double pressure_pa,
                const FemSettings& settings) {
  const fem::ShellMesh mesh = fem::mesh_cap(geom, settings.elements);
  return fem::solve_case(mesh, thickness_m, material, pressure_pa, settings.bc).apex_deflection;
}

// Root of the FEM apex deflection against the limit. The response falls
// monotonically with thickness; the bracket spans 1/1000 to 8 times the
// thickness cap.
std::optional<double> fem_min_thickness(const Material& material, const CapGeometry& geom,
                                        const ScreeningCriteria& criteria, const FemSettings& settings) {
  if (std::isinf(criteria.deflection_limit)) return 0.0;
  const double lo = 1e-3 * criteria.max_thickness;
  const double hi = 8.0 * criteria.max_thickness;
  auto excess = [&](double t) {
    return fem_apex(material, geom, t, criteria.max_pressure, settings) - criteria.deflection_limit;
  };
  const double f_hi = excess(hi);
  if (f_hi > 0.0) return std::nullopt;
  const double f_lo = excess(lo);
  if (f_lo <= 0.0) return lo;
  std::uintmax_t iterations = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(
      excess, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(40), iterations);
  return 0.5 * (a + b);
}

std::optional<double> fit_min_thickness(const LinearModelFit& fit, LevelCode material,
                                        const ScreeningCriteria& criteria, const units::PressureScale& scale) {
  if (std::isinf(criteria.deflection_limit)) return 0.0;
  const double limit_um = units::m_to_um(criteria.deflection_limit);
  const double p_atm = scale.to_atm(criteria.max_pressure);
  const double at_center = fit.predict(material, fit.thickness_center, p_atm);
  if (fit.thickness_slope < 0.0) {
    const double t_um = fit.thickness_center + (limit_um - at_center) / fit.thickness_slope;
    return units::um_to_m(std::max(t_um, 0.0));
  }
  // A non-decreasing fitted trend is feasible only if thin shells already pass.
  if (fit.predict(material, 0.0, p_atm) <= limit_um) return 0.0;
  return std::nullopt;
}

}  // namespace

void ScreeningCriteria::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || std::isnan(v)) {
      throw ValidationError(fmt::format("screening criteria: {} must be positive (got {})", what, v));
    }
  };
  positive(deflection_limit, "deflection_limit");
  positive(max_pressure, "max_pressure");
  positive(max_thickness, "max_thickness");
  positive(thickness_range.lo, "thickness_range lower bound");
  positive(pressure_range.lo, "pressure_range lower bound");
  if (!(thickness_range.hi > thickness_range.lo) || !(pressure_range.hi > pressure_range.lo)) {
    throw ValidationError("screening criteria: ranges must have hi > lo");
  }
  if (!(marginal_band >= 0.0 && marginal_band < 1.0)) {
    throw ValidationError(fmt::format("screening criteria: marginal_band must lie in [0, 1) (got {})",
                                      marginal_band));
  }
}

std::string_view to_string(VerdictSource source) {
  switch (source) {
    case VerdictSource::analytical: return "analytical";
    case VerdictSource::fem: return "fem";
    case VerdictSource::external_fit: return "external-fit";
  }
  return "unknown";
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::pass: return "pass";
    case Classification::marginal: return "marginal";
    case Classification::fail: return "fail";
  }
  return "unknown";
}

double min_thickness(const Material& material, const CapGeometry& geom, double pressure_pa, double limit_m) {
  if (!(pressure_pa > 0.0) || !(limit_m > 0.0) || !std::isfinite(pressure_pa) || std::isnan(limit_m)) {
    throw DomainError("min_thickness needs positive pressure and deflection limit");
  }
  validate(material);
  const double a = geom.radius();
  return a * a * pressure_pa * apex_factor(material.poisson_ratio, geom.base_angle()) /
         (material.youngs_modulus() * limit_m);
}

Classification classify(const std::optional<double>& t_min, const ScreeningCriteria& criteria) {
  if (!t_min) return Classification::fail;
  if (*t_min <= criteria.max_thickness * (1.0 - criteria.marginal_band)) return Classification::pass;
  if (*t_min <= criteria.max_thickness * (1.0 + criteria.marginal_band)) return Classification::marginal;
  return Classification::fail;
}

std::vector<Verdict> screen(const MaterialLibrary& library, const CapGeometry& geom,
                            const ScreeningCriteria& criteria, const ScreeningInputs& inputs) {
  criteria.validate();
  if (inputs.source == VerdictSource::external_fit && inputs.fit == nullptr) {
    throw ValidationError("external-fit screening needs fitted L9 results");
  }
  std::vector<Verdict> verdicts;
  for (const auto& material : library) {
    Verdict v;
    v.material = material.name;
    v.source = inputs.source;
    switch (inputs.source) {
      case VerdictSource::analytical: {
        v.min_feasible_thickness = min_thickness(material, geom, criteria.max_pressure, criteria.deflection_limit);
        v.worst_case_deflection =
            apex_deflection(ShellCase(geom, criteria.max_thickness, material, criteria.max_pressure));
        break;
      }
      case VerdictSource::fem: {
        v.min_feasible_thickness = fem_min_thickness(material, geom, criteria, inputs.fem);
        v.worst_case_deflection =
            fem_apex(material, geom, criteria.max_thickness, criteria.max_pressure, inputs.fem);
        break;
      }
      case VerdictSource::external_fit: {
        const auto level = std::find(inputs.fit->material_levels.begin(), inputs.fit->material_levels.end(),
                                     material.name);
        if (level == inputs.fit->material_levels.end()) continue;
        const auto code = static_cast<LevelCode>(level - inputs.fit->material_levels.begin()) - 1;
        v.min_feasible_thickness = fit_min_thickness(*inputs.fit, code, criteria, inputs.scale);
        v.worst_case_deflection = units::um_to_m(inputs.fit->predict(
            code, units::m_to_um(criteria.max_thickness), inputs.scale.to_atm(criteria.max_pressure)));
        break;
      }
    }
    v.classification = classify(v.min_feasible_thickness, criteria);
    verdicts.push_back(std::move(v));
  }
  std::stable_sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) {
    const double ta = a.min_feasible_thickness.value_or(std::numeric_limits<double>::infinity());
    const double tb = b.min_feasible_thickness.value_or(std::numeric_limits<double>::infinity());
    if (ta != tb) return ta < tb;
    return a.material < b.material;
  });
  return verdicts;
}

std::optional<Verdict> best(std::span<const Verdict> verdicts) {
  std::optional<Verdict> winner;
  for (const auto& v : verdicts) {
    if (v.classification != Classification::pass) continue;
    if (!winner || *v.min_feasible_thickness < *winner->min_feasible_thickness) winner = v;
  }
  return winner;
}

double desirability(double w, double lower_target, double upper_bound) {
  if (!(lower_target < upper_bound)) {
    throw DomainError(fmt::format("desirability needs target < bound (got {}, {})", lower_target, upper_bound));
  }
  if (w <= lower_target) return 1.0;
  if (w >= upper_bound) return 0.0;
  return std::clamp((upper_bound - w) / (upper_bound - lower_target), 0.0, 1.0);
}

std::vector<ThicknessPoint> thickness_profile(const Material& material, const CapGeometry& geom,
                                              double pressure_pa, Range range, std::size_t n, double limit_m) {
  if (n < 2) {
    throw DomainError(fmt::format("thickness profile needs at least 2 points (got {})", n));
  }
  if (!(range.lo > 0.0) || !(range.hi > range.lo) || !std::isfinite(range.hi)) {
    throw DomainError("thickness profile range must satisfy 0 < lo < hi");
  }
  std::vector<ThicknessPoint> curve;
  curve.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t =
        i + 1 == n ? range.hi : range.lo + (range.hi - range.lo) * static_cast<double>(i) / (n - 1);
    const double w = apex_deflection(ShellCase(geom, t, material, pressure_pa));
    curve.push_back({t, w, desirability(w, 0.0, limit_m)});
  }
  return curve;
}

std::string verdicts_csv(std::span<const Verdict> verdicts) {
  std::string out = "material,source,min_thickness_um,worst_case_deflection_um,classification\n";
  for (const auto& v : verdicts) {
    out += fmt::format("{},{},{},{:.2f},{}\n", v.material, to_string(v.source),
                       v.min_feasible_thickness ? fmt::format("{:.2f}", units::m_to_um(*v.min_feasible_thickness))
                                                : std::string("infeasible"),
                       units::m_to_um(v.worst_case_deflection), to_string(v.classification));
  }
  return out;
}

std::string verdicts_json(std::span<const Verdict> verdicts) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : verdicts) {
    rows.push_back({{"material", v.material},
                    {"source", to_string(v.source)},
                    {"min_thickness_um", v.min_feasible_thickness
                                             ? nlohmann::json(units::m_to_um(*v.min_feasible_thickness))
                                             : nlohmann::json(nullptr)},
                    {"worst_case_deflection_um", units::m_to_um(v.worst_case_deflection)},
                    {"classification", to_string(v.classification)}});
  }
  return nlohmann::json{{"verdicts", rows}}.dump(2) + "\n";
}

std::string thickness_profile_csv(std::span<const ThicknessPoint> curve) {
  std::string out = "thickness_um,deflection_um,desirability\n";
  for (const auto& p : curve) {
    out += fmt::format("{:.4f},{:.4f},{:.6f}\n", units::m_to_um(p.thickness), units::m_to_um(p.deflection),
                       p.desirability);
  }
  return out;
}

std::string thickness_profile_svg(std::span<const ThicknessPoint> curve, double limit_m,
                                  std::string_view title) {
  LinePlot plot;
  plot.title = std::string(title);
  plot.x_label = "thickness (um)";
  plot.y_label = "apex deflection (um)";
  for (const auto& p : curve) {
    plot.points.emplace_back(units::m_to_um(p.thickness), units::m_to_um(p.deflection));
  }
  if (std::isfinite(limit_m)) {
    plot.horizontal_rule = units::m_to_um(limit_m);
    plot.rule_label = fmt::format("limit {:g} um", units::m_to_um(limit_m));
  }
  return render_svg(plot);
}

}  // namespace globtop
