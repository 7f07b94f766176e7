// Command-line front end for the encapsulant screening toolkit.
//
// Exit status: 0 success, 1 validation/usage error, 2 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "globtop/doe.hpp"
#include "globtop/error.hpp"
#include "globtop/fem.hpp"
#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"
#include "globtop/screening.hpp"
#include "globtop/shell_model.hpp"
#include "globtop/stats.hpp"
#include "globtop/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace globtop;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::string format = "text";
  std::optional<double> atm_pa;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << content;
}

StudyConfig load_config(const GlobalOptions& g) {
  std::string text = g.config_path.empty() ? std::string(default_study_config_text()) : read_text(g.config_path);
  fs::path base = g.config_path.empty() ? fs::path(".") : fs::path(g.config_path).parent_path();
  if (base.empty()) base = ".";
  if (g.atm_pa) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError(fmt::format("study config: {}", e.what()));
    }
    doc["units"]["atm_pa"] = *g.atm_pa;
    text = doc.dump(2) + "\n";
  }
  return parse_study_config(text, base);
}

double pa_from_atm(const StudyConfig& c, double atm) { return c.scale.to_pa(atm); }

void emit(const GlobalOptions& g, const std::string& text, const std::string& csv, const json& j) {
  if (g.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else if (g.format == "csv") {
    std::cout << csv;
  } else {
    std::cout << text;
  }
}

int run_geometry(const GlobalOptions& g, std::optional<double> b_um, std::optional<double> h_um,
                 std::optional<double> radius_um, std::optional<double> angle_deg, std::optional<double> t_um) {
  const bool radius_form = radius_um || angle_deg;
  if (radius_form && (b_um || h_um)) {
    throw ValidationError("give either --b-um/--h-um or --radius-um/--angle-deg, not both");
  }
  CapGeometry geom = radius_form ? CapGeometry::from_radius_angle(units::um_to_m(radius_um.value_or(3010.0)),
                                                                  angle_deg.value_or(23.5))
                                 : solve_cap(units::um_to_m(b_um.value_or(1200.0)),
                                             units::um_to_m(h_um.value_or(250.0)));
  json j{{"base_half_width_um", units::m_to_um(geom.base_half_width())},
         {"rise_um", units::m_to_um(geom.rise())},
         {"radius_um", units::m_to_um(geom.radius())},
         {"base_angle_deg", geom.base_angle_deg()}};
  std::string text = fmt::format("b = {:.4f} um, h = {:.4f} um, a = {:.4f} um, alpha = {:.4f} deg\n",
                                 units::m_to_um(geom.base_half_width()), units::m_to_um(geom.rise()),
                                 units::m_to_um(geom.radius()), geom.base_angle_deg());
  std::string csv = "base_half_width_um,rise_um,radius_um,base_angle_deg";
  std::string row = fmt::format("{:.6f},{:.6f},{:.6f},{:.6f}", units::m_to_um(geom.base_half_width()),
                                units::m_to_um(geom.rise()), units::m_to_um(geom.radius()), geom.base_angle_deg());
  if (t_um) {
    const ThinnessRatio tr = thinness_ratio(geom, units::um_to_m(*t_um));
    j["thickness_um"] = *t_um;
    j["thinness_ratio"] = tr.ratio;
    j["thin_shell_warning"] = tr.warning;
    text += fmt::format("t/a = {:.4f}{}\n", tr.ratio, tr.warning ? " (warning: above thin-shell limit 0.1)" : "");
    csv += ",thickness_um,thinness_ratio,thin_shell_warning";
    row += fmt::format(",{:.6f},{:.6f},{}", *t_um, tr.ratio, tr.warning ? 1 : 0);
  }
  emit(g, text, csv + "\n" + row + "\n", j);
  return 0;
}

int run_deflect(const GlobalOptions& g, const std::string& material, double t_um, double p_atm,
                std::size_t samples, bool exact_geometry) {
  const StudyConfig c = load_config(g);
  const CapGeometry geom = exact_geometry ? exact_reference_cap() : c.geometry;
  const ShellCase sc(geom, units::um_to_m(t_um), c.library.find(material), pa_from_atm(c, p_atm));
  const double apex = apex_deflection(sc);
  json j{{"material", sc.material().name},
         {"thickness_um", t_um},
         {"pressure_atm", p_atm},
         {"apex_deflection_um", units::m_to_um(apex)},
         {"thin_shell_warning", sc.thin_shell_warning()}};
  std::string text = fmt::format("{}: t = {:g} um, P = {:g} atm, apex deflection {:.3f} um\n", sc.material().name,
                                 t_um, p_atm, units::m_to_um(apex));
  if (sc.thin_shell_warning()) text += "warning: t/a above thin-shell limit 0.1\n";
  std::string csv = fmt::format("material,thickness_um,pressure_atm,apex_deflection_um\n{},{:.2f},{:.2f},{:.6f}\n",
                                sc.material().name, t_um, p_atm, units::m_to_um(apex));
  if (samples >= 2) {
    const DeflectionProfile prof = profile(sc, samples);
    if (!g.out_dir.empty()) {
      write_text(fs::path(g.out_dir) / "profile.csv", profile_csv(prof));
    } else if (g.format == "csv") {
      csv = profile_csv(prof);
    }
    json samples_json = json::array();
    for (const auto& s : prof.samples) {
      samples_json.push_back(
          {{"phi_deg", units::rad_to_deg(s.phi)}, {"v_um", units::m_to_um(s.v)}, {"w_um", units::m_to_um(s.w)}});
    }
    j["profile"] = samples_json;
  }
  emit(g, text, csv, j);
  return 0;
}

int run_plan(const GlobalOptions& g) {
  const StudyConfig c = load_config(g);
  const ExperimentPlan plan = build_plan(c);
  const std::string csv = plan_csv(plan, c.scale);
  if (!g.out_dir.empty()) write_text(fs::path(g.out_dir) / "plan.csv", csv);
  json rows = json::array();
  for (std::size_t i = 0; i < 9; ++i) {
    rows.push_back({{"run", i + 1},
                    {"material", plan.realized[i].material},
                    {"thickness_um", units::m_to_um(plan.realized[i].thickness)},
                    {"pressure_atm", c.scale.to_atm(plan.realized[i].pressure)},
                    {"codes", plan.codes[i]}});
  }
  emit(g, csv, csv, json{{"plan", rows}});
  return 0;
}

int run_study_cmd(const GlobalOptions& g) {
  const StudyConfig c = load_config(g);
  const fs::path out = g.out_dir.empty() ? fs::path(c.output_dir) : fs::path(g.out_dir);
  const StudyReport report = run_study_to(c, out);
  if (g.format == "json") {
    std::cout << report_json(report, c);
    return 0;
  }
  if (g.format == "csv") {
    std::cout << verdicts_csv(report.verdicts);
    return 0;
  }
  std::cout << fmt::format("study written to {}\n", out.string());
  for (const auto& a : report.analyses) {
    std::cout << fmt::format("[{}] most sensitive factor: {} (p = {:.4f})\n", to_string(a.source),
                             a.effects.most_sensitive().source, a.effects.most_sensitive().p);
  }
  std::cout << verdicts_csv(report.verdicts);
  return 0;
}

int run_anova(const GlobalOptions& g, const std::string& responses_path, std::optional<double> ss_model,
              std::optional<int> df_model, std::optional<double> ss_error, std::optional<int> df_error) {
  if (!responses_path.empty()) {
    const StudyConfig c = load_config(g);
    const auto results = parse_responses_csv(read_text(responses_path), c.scale);
    const LinearModelFit fit = fit_screening_model(results, c.scale);
    const AnovaTable table = model_anova(fit);
    const EffectTests effects = effect_tests(fit);
    if (!g.out_dir.empty()) {
      write_text(fs::path(g.out_dir) / "anova.csv", anova_csv(table));
      write_text(fs::path(g.out_dir) / "effects.csv", effects_csv(effects));
    }
    const std::string csv = anova_csv(table) + "\n" + effects_csv(effects);
    emit(g, csv, csv,
         json{{"anova", json::parse(anova_json(table))["anova"]},
              {"effects", json::parse(effects_json(effects))["effects"]}});
    return 0;
  }
  if (!(ss_model && df_model && ss_error && df_error)) {
    throw ValidationError("anova needs --responses or all of --ss-model --df-model --ss-error --df-error");
  }
  const AnovaTable table = anova_from_components(*ss_model, *df_model, *ss_error, *df_error);
  const std::string csv = anova_csv(table);
  emit(g, csv, csv, json::parse(anova_json(table)));
  return 0;
}

int run_optimize(const GlobalOptions& g, const std::string& material, std::optional<double> p_atm,
                 std::optional<double> limit_um, std::size_t samples) {
  const StudyConfig c = load_config(g);
  const double pressure = p_atm ? pa_from_atm(c, *p_atm) : c.criteria.max_pressure;
  const double limit = limit_um ? units::um_to_m(*limit_um) : c.criteria.deflection_limit;
  ScreeningCriteria criteria = c.criteria;
  criteria.max_pressure = pressure;
  criteria.deflection_limit = limit;

  std::vector<Material> materials;
  if (material.empty()) {
    materials = c.library.materials();
  } else {
    materials.push_back(c.library.find(material));
  }
  std::string text;
  std::string csv = "material,min_thickness_um,classification\n";
  json rows = json::array();
  for (const auto& m : materials) {
    const double t_min = min_thickness(m, c.geometry, pressure, limit);
    const Classification cls = classify(t_min, criteria);
    text += fmt::format("{}: minimum thickness {:.2f} um at {:g} atm for {:g} um ({})\n", m.name,
                        units::m_to_um(t_min), c.scale.to_atm(pressure), units::m_to_um(limit), to_string(cls));
    csv += fmt::format("{},{:.2f},{}\n", m.name, units::m_to_um(t_min), to_string(cls));
    rows.push_back({{"material", m.name}, {"min_thickness_um", units::m_to_um(t_min)}, {"classification", to_string(cls)}});
    if (!g.out_dir.empty()) {
      const auto curve = thickness_profile(m, c.geometry, pressure, c.criteria.thickness_range, samples, limit);
      const std::string stem = file_stem(m.name);
      write_text(fs::path(g.out_dir) / fmt::format("profile_{}.csv", stem), thickness_profile_csv(curve));
      write_text(fs::path(g.out_dir) / fmt::format("profile_{}.svg", stem),
                 thickness_profile_svg(curve, limit, fmt::format("{} at {:g} atm", m.name, c.scale.to_atm(pressure))));
    }
  }
  emit(g, text, csv, json{{"optimize", rows}});
  return 0;
}

int run_fem(const GlobalOptions& g, const std::string& material, double t_um, double p_atm, std::size_t elements,
            const std::string& bc_name, std::size_t levels) {
  const StudyConfig c = load_config(g);
  const Material& m = c.library.find(material);
  const fem::RimCondition bc = fem::parse_rim_condition(bc_name);
  const double t = units::um_to_m(t_um);
  const double p = pa_from_atm(c, p_atm);
  const fem::FemSolution sol = fem::solve_case(fem::mesh_cap(c.geometry, elements), t, m, p, bc);
  json j{{"material", m.name},
         {"thickness_um", t_um},
         {"pressure_atm", p_atm},
         {"elements", sol.elements},
         {"boundary", fem::to_string(bc)},
         {"apex_deflection_um", units::m_to_um(sol.apex_deflection)},
         {"analytical_apex_um", units::m_to_um(apex_deflection(ShellCase(c.geometry, t, m, p)))},
         {"pivot_ratio", sol.pivot_ratio}};
  std::string text = fmt::format("{}: t = {:g} um, P = {:g} atm, {} elements ({}): apex deflection {:.3f} um\n",
                                 m.name, t_um, p_atm, sol.elements, fem::to_string(bc),
                                 units::m_to_um(sol.apex_deflection));
  std::optional<fem::ConvergenceReport> conv;
  if (levels >= 3) {
    conv = fem::converge(c.geometry, t, m, p, bc, levels, elements);
    j["convergence"] = json::parse(fem::convergence_json(*conv));
    text += fmt::format("extrapolated {:.4f} um, observed order {:.2f}{}\n", units::m_to_um(conv->extrapolated),
                        conv->observed_order, conv->contracting && conv->monotone ? "" : " (flagged: non-monotone)");
  }
  if (!g.out_dir.empty()) {
    write_text(fs::path(g.out_dir) / "fem_solution.csv", fem::solution_csv(sol));
    if (conv) write_text(fs::path(g.out_dir) / "convergence.json", fem::convergence_json(*conv));
  }
  emit(g, text, fem::solution_csv(sol), j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glob-top encapsulant screening: cap geometry, shell deflection, L9 plans, ANOVA, FEM"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Study configuration JSON");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--atm-pa", g.atm_pa, "Pascal per atmosphere (default 101325)")->check(CLI::PositiveNumber);

  std::optional<double> b_um, h_um, radius_um, angle_deg, t_um_geom;
  auto* geometry = app.add_subcommand("geometry", "Solve the spherical cap from its base half-width and rise");
  geometry->add_option("--b-um", b_um, "Base half-width (um), default 1200");
  geometry->add_option("--h-um", h_um, "Cap rise (um), default 250");
  geometry->add_option("--radius-um", radius_um, "Sphere radius (um)");
  geometry->add_option("--angle-deg", angle_deg, "Base angle (deg)");
  geometry->add_option("--t-um", t_um_geom, "Shell thickness for the thinness check (um)");

  std::string material;
  double thickness_um = 200.0;
  double pressure_atm = 100.0;
  std::size_t samples = 0;
  bool exact_geometry = false;
  auto* deflect = app.add_subcommand("deflect", "Analytical apex deflection and meridian profile");
  deflect->add_option("--material", material, "Material name")->required();
  deflect->add_option("--thickness-um", thickness_um, "Shell thickness (um)")->required();
  deflect->add_option("--pressure-atm", pressure_atm, "Pressure (atm)")->required();
  deflect->add_option("--samples", samples, "Profile samples (>= 2 to emit a profile)");
  deflect->add_flag("--exact-geometry", exact_geometry, "Use the exact 1200/250 um cap instead of the rounded one");

  auto* plan = app.add_subcommand("plan", "Emit the L9 experiment plan");

  auto* study = app.add_subcommand("study", "Run the full screening pipeline");

  std::string responses_path;
  std::optional<double> ss_model, ss_error;
  std::optional<int> df_model, df_error;
  auto* anova = app.add_subcommand("anova", "ANOVA and effect tests from a responses CSV or printed components");
  anova->add_option("--responses", responses_path, "Responses CSV (as written by study)");
  anova->add_option("--ss-model", ss_model, "Model sum of squares");
  anova->add_option("--df-model", df_model, "Model degrees of freedom");
  anova->add_option("--ss-error", ss_error, "Error sum of squares");
  anova->add_option("--df-error", df_error, "Error degrees of freedom");

  std::string opt_material;
  std::optional<double> opt_pressure, opt_limit;
  std::size_t opt_samples = 41;
  auto* optimize = app.add_subcommand("optimize", "Minimum admissible thickness and thickness profiles");
  optimize->add_option("--material", opt_material, "Material name (default: all)");
  optimize->add_option("--pressure-atm", opt_pressure, "Pressure (atm), default the criteria maximum");
  optimize->add_option("--limit-um", opt_limit, "Deflection limit (um), default the criteria limit");
  optimize->add_option("--samples", opt_samples, "Profile points")->check(CLI::Range(2, 100000));

  std::string fem_material;
  double fem_t = 150.0;
  double fem_p = 100.0;
  std::size_t fem_elements = 256;
  std::string fem_bc = "clamped";
  std::size_t fem_levels = 0;
  auto* femcmd = app.add_subcommand("fem", "Axisymmetric shell finite element solve and convergence ladder");
  femcmd->add_option("--material", fem_material, "Material name")->required();
  femcmd->add_option("--thickness-um", fem_t, "Shell thickness (um)");
  femcmd->add_option("--pressure-atm", fem_p, "Pressure (atm)");
  femcmd->add_option("--elements", fem_elements, "Number of elements (>= 4)");
  femcmd->add_option("--bc", fem_bc, "Rim condition")->check(CLI::IsMember({"clamped", "pinned"}));
  femcmd->add_option("--levels", fem_levels, "Refinement levels for a convergence study (>= 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*geometry) return run_geometry(g, b_um, h_um, radius_um, angle_deg, t_um_geom);
    if (*deflect) return run_deflect(g, material, thickness_um, pressure_atm, samples, exact_geometry);
    if (*plan) return run_plan(g);
    if (*study) return run_study_cmd(g);
    if (*anova) return run_anova(g, responses_path, ss_model, df_model, ss_error, df_error);
    if (*optimize) return run_optimize(g, opt_material, opt_pressure, opt_limit, opt_samples);
    if (*femcmd) return run_fem(g, fem_material, fem_t, fem_p, fem_elements, fem_bc, fem_levels);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
