#include "globtop/study.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "globtop/error.hpp"
#include "globtop/fem.hpp"
#include "globtop/shell_model.hpp"

namespace globtop {

namespace {

using nlohmann::json;

constexpr std::string_view kDefaultStudy = R"({
  "geometry": {"radius_um": 3010, "base_angle_deg": 23.5},
  "levels": {"thickness_um": [150, 200, 250], "pressure_atm": [80, 90, 100]},
  "criteria": {
    "deflection_limit_um": 5,
    "max_pressure_atm": 100,
    "max_thickness_um": 250,
    "marginal_band": 0.05,
    "thickness_range_um": [100, 300],
    "pressure_range_atm": [80, 100]
  },
  "sources": ["analytical", "fem"],
  "fem": {"elements": 256, "boundary": "clamped"},
  "units": {"atm_pa": 101325},
  "output_dir": "study_out"
}
)";

// Rethrow an error of the same category with a stage prefix.
template <typename Fn>
auto in_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError(fmt::format("stage '{}': {}", stage, e.what()));
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("stage '{}': {}", stage, e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("stage '{}': {}", stage, e.what()));
  }
}

const json& require(const json& obj, const char* key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(fmt::format("study config: {} is missing '{}'", where, key));
  }
  return *it;
}

double number(const json& value, const std::string& what) {
  if (!value.is_number()) {
    throw ValidationError(fmt::format("study config: {} must be a number", what));
  }
  return value.get<double>();
}

std::vector<double> numbers(const json& value, const std::string& what, std::size_t expected) {
  if (!value.is_array() || value.size() != expected) {
    throw ValidationError(fmt::format("study config: {} must be an array of {} numbers", what, expected));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(number(value[i], fmt::format("{}[{}]", what, i)));
  }
  return out;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(fmt::format("study config: unknown key '{}' in {}", key, where));
    }
  }
}

CapGeometry parse_geometry(const json& g) {
  if (!g.is_object()) {
    throw ValidationError("study config: geometry must be an object");
  }
  const bool rise_form = g.contains("base_half_width_um") || g.contains("rise_um");
  const bool radius_form = g.contains("radius_um") || g.contains("base_angle_deg");
  if (rise_form == radius_form) {
    throw ValidationError(
        "study config: geometry needs exactly one of {base_half_width_um, rise_um} or "
        "{radius_um, base_angle_deg}");
  }
  try {
    if (rise_form) {
      reject_unknown_keys(g, {"base_half_width_um", "rise_um"}, "geometry");
      return solve_cap(units::um_to_m(number(require(g, "base_half_width_um", "geometry"), "base_half_width_um")),
                       units::um_to_m(number(require(g, "rise_um", "geometry"), "rise_um")));
    }
    reject_unknown_keys(g, {"radius_um", "base_angle_deg"}, "geometry");
    return CapGeometry::from_radius_angle(units::um_to_m(number(require(g, "radius_um", "geometry"), "radius_um")),
                                          number(require(g, "base_angle_deg", "geometry"), "base_angle_deg"));
  } catch (const DomainError& e) {
    throw ValidationError(fmt::format("study config: geometry: {}", e.what()));
  }
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  }
  out << content;
  if (!out) {
    throw ValidationError(fmt::format("failed writing '{}'", path.string()));
  }
}

std::vector<double> responses_of(const SourceAnalysis& a) {
  std::vector<double> r;
  for (const auto& rr : a.results) r.push_back(rr.response);
  return r;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string_view default_study_config_text() { return kDefaultStudy; }

StudyConfig parse_study_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("study config: {}", e.what()));
  }
  if (!doc.is_object()) {
    throw ValidationError("study config: top level must be an object");
  }
  reject_unknown_keys(doc,
                      {"geometry", "materials_file", "material_levels", "levels", "criteria", "sources",
                       "external_responses", "fem", "profile_points", "units", "output_dir"},
                      "top level");
  StudyConfig c;
  c.config_text = std::string(json_text);

  if (doc.contains("units")) {
    reject_unknown_keys(doc["units"], {"atm_pa"}, "units");
    if (doc["units"].contains("atm_pa")) {
      c.scale.atm_pa = number(doc["units"]["atm_pa"], "units.atm_pa");
      if (!(c.scale.atm_pa > 0.0)) throw ValidationError("study config: units.atm_pa must be positive");
    }
  }
  if (doc.contains("geometry")) {
    c.geometry = parse_geometry(doc["geometry"]);
  }
  if (doc.contains("materials_file")) {
    if (!doc["materials_file"].is_string()) {
      throw ValidationError("study config: materials_file must be a string");
    }
    std::filesystem::path path = doc["materials_file"].get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    if (!std::filesystem::exists(path)) {
      throw ValidationError(fmt::format("study config: materials file '{}' does not exist", path.string()));
    }
    c.library = load_library_file(path.string());
  }
  if (doc.contains("material_levels")) {
    const auto& levels = doc["material_levels"];
    if (!levels.is_array() || levels.size() != 3) {
      throw ValidationError("study config: material_levels must list exactly 3 materials");
    }
    for (const auto& name : levels) {
      if (!name.is_string()) throw ValidationError("study config: material_levels entries must be strings");
      c.material_levels.push_back(c.library.find(name.get<std::string>()).name);
    }
  }
  c.pressure_levels = {c.scale.to_pa(80.0), c.scale.to_pa(90.0), c.scale.to_pa(100.0)};
  if (doc.contains("levels")) {
    const auto& levels = doc["levels"];
    reject_unknown_keys(levels, {"thickness_um", "pressure_atm"}, "levels");
    if (levels.contains("thickness_um")) {
      const auto t = numbers(levels["thickness_um"], "levels.thickness_um", 3);
      for (std::size_t i = 0; i < 3; ++i) c.thickness_levels[i] = units::um_to_m(t[i]);
    }
    if (levels.contains("pressure_atm")) {
      const auto p = numbers(levels["pressure_atm"], "levels.pressure_atm", 3);
      for (std::size_t i = 0; i < 3; ++i) c.pressure_levels[i] = c.scale.to_pa(p[i]);
    }
  }
  c.criteria.max_pressure = c.scale.to_pa(100.0);
  c.criteria.pressure_range = {c.scale.to_pa(80.0), c.scale.to_pa(100.0)};
  if (doc.contains("criteria")) {
    const auto& cr = doc["criteria"];
    reject_unknown_keys(cr,
                        {"deflection_limit_um", "max_pressure_atm", "max_thickness_um", "marginal_band",
                         "thickness_range_um", "pressure_range_atm"},
                        "criteria");
    if (cr.contains("deflection_limit_um"))
      c.criteria.deflection_limit = units::um_to_m(number(cr["deflection_limit_um"], "deflection_limit_um"));
    if (cr.contains("max_pressure_atm"))
      c.criteria.max_pressure = c.scale.to_pa(number(cr["max_pressure_atm"], "max_pressure_atm"));
    if (cr.contains("max_thickness_um"))
      c.criteria.max_thickness = units::um_to_m(number(cr["max_thickness_um"], "max_thickness_um"));
    if (cr.contains("marginal_band")) c.criteria.marginal_band = number(cr["marginal_band"], "marginal_band");
    if (cr.contains("thickness_range_um")) {
      const auto r = numbers(cr["thickness_range_um"], "thickness_range_um", 2);
      c.criteria.thickness_range = {units::um_to_m(r[0]), units::um_to_m(r[1])};
    }
    if (cr.contains("pressure_range_atm")) {
      const auto r = numbers(cr["pressure_range_atm"], "pressure_range_atm", 2);
      c.criteria.pressure_range = {c.scale.to_pa(r[0]), c.scale.to_pa(r[1])};
    }
  }
  c.criteria.validate();

  if (doc.contains("sources")) {
    const auto& s = doc["sources"];
    if (!s.is_array()) throw ValidationError("study config: sources must be an array");
    c.sources.clear();
    for (const auto& name : s) {
      if (!name.is_string()) throw ValidationError("study config: sources entries must be strings");
      const ResponseSource src = parse_response_source(name.get<std::string>());
      if (std::find(c.sources.begin(), c.sources.end(), src) != c.sources.end()) {
        throw ValidationError(fmt::format("study config: duplicate source '{}'", to_string(src)));
      }
      c.sources.push_back(src);
    }
  }
  if (c.sources.empty()) {
    throw ValidationError("study config: at least one response source is required");
  }
  if (doc.contains("external_responses")) {
    const auto& ext = doc["external_responses"];
    reject_unknown_keys(ext, {"simulated_um", "calculated_um"}, "external_responses");
    ExternalResponses e;
    for (const double v : numbers(require(ext, "simulated_um", "external_responses"), "simulated_um", 9)) {
      e.simulated.push_back(units::um_to_m(v));
    }
    if (ext.contains("calculated_um")) {
      for (const double v : numbers(ext["calculated_um"], "calculated_um", 9)) {
        e.calculated.push_back(units::um_to_m(v));
      }
    }
    c.external = std::move(e);
  }
  const bool wants_external =
      std::find(c.sources.begin(), c.sources.end(), ResponseSource::external) != c.sources.end();
  if (wants_external && !c.external) {
    throw ValidationError("study config: source 'external' needs external_responses.simulated_um");
  }
  if (doc.contains("fem")) {
    const auto& f = doc["fem"];
    reject_unknown_keys(f, {"elements", "boundary"}, "fem");
    if (f.contains("elements")) {
      const double n = number(f["elements"], "fem.elements");
      if (n < 4 || n != std::floor(n)) throw ValidationError("study config: fem.elements must be an integer >= 4");
      c.fem.elements = static_cast<std::size_t>(n);
    }
    if (f.contains("boundary")) {
      if (!f["boundary"].is_string()) throw ValidationError("study config: fem.boundary must be a string");
      c.fem.bc = fem::parse_rim_condition(f["boundary"].get<std::string>());
    }
  }
  if (doc.contains("profile_points")) {
    const double n = number(doc["profile_points"], "profile_points");
    if (n < 2 || n != std::floor(n)) throw ValidationError("study config: profile_points must be an integer >= 2");
    c.profile_points = static_cast<std::size_t>(n);
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ValidationError("study config: output_dir must be a string");
    std::filesystem::path out = doc["output_dir"].get<std::string>();
    c.output_dir = (out.is_relative() ? base_dir / out : out).string();
  }
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open study config '{}'", path.string()));
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_study_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

ExperimentPlan build_plan(const StudyConfig& config) {
  std::vector<Material> materials;
  if (config.material_levels.empty()) {
    materials = config.library.by_stiffness();
    if (materials.size() != 3) {
      throw ValidationError(fmt::format(
          "L9 plan needs 3 materials; the library has {} (set material_levels)", materials.size()));
    }
  } else {
    for (const auto& name : config.material_levels) materials.push_back(config.library.find(name));
    std::stable_sort(materials.begin(), materials.end(), [](const Material& a, const Material& b) {
      return a.youngs_modulus_gpa < b.youngs_modulus_gpa;
    });
  }
  const std::array<Factor, 3> factors = {material_factor(materials), thickness_factor(config.thickness_levels),
                                         pressure_factor(config.pressure_levels)};
  return build_l9(factors);
}

std::vector<ComparisonRow> compare_responses(std::span<const double> simulated, std::span<const double> calculated,
                                             std::string_view simulated_source, std::string_view calculated_source) {
  if (simulated.size() != calculated.size()) {
    throw ValidationError("comparison needs equally many simulated and calculated responses");
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < simulated.size(); ++i) {
    if (!(simulated[i] != 0.0)) {
      throw DomainError(fmt::format("run {}: simulated response is zero", i + 1));
    }
    const double ratio = calculated[i] / simulated[i];
    rows.push_back({i + 1, std::string(simulated_source), std::string(calculated_source), simulated[i],
                    calculated[i], ratio, (ratio - 1.0) * 100.0});
  }
  return rows;
}

const SourceAnalysis& StudyReport::analysis(ResponseSource source) const {
  for (const auto& a : analyses) {
    if (a.source == source) return a;
  }
  throw DomainError(fmt::format("study has no '{}' responses", to_string(source)));
}

StudyReport run_study(const StudyConfig& config) {
  if (config.sources.empty()) {
    throw ValidationError("study config: at least one response source is required");
  }
  StudyReport report{config.geometry, in_stage("plan", [&] { return build_plan(config); }), {}, {}, {},
                     sha256_hex(config.config_text), GLOBTOP_VERSION};

  for (const ResponseSource source : config.sources) {
    const std::string stage = fmt::format("responses/{}", to_string(source));
    Responder responder;
    switch (source) {
      case ResponseSource::analytical:
        responder = [](std::size_t, const ShellCase& c) { return apex_deflection(c); };
        break;
      case ResponseSource::fem:
        responder = [&config](std::size_t, const ShellCase& c) {
          const fem::ShellMesh mesh = fem::mesh_cap(c.geometry(), config.fem.elements);
          return fem::solve_case(mesh, c.thickness(), c.material(), c.pressure(), config.fem.bc).apex_deflection;
        };
        break;
      case ResponseSource::external:
        if (!config.external) throw ValidationError("source 'external' needs external responses");
        responder = external_responder(config.external->simulated);
        break;
    }
    SourceAnalysis a{source, {}, {}, {}, {}};
    a.results = in_stage(stage, [&] {
      return realize_responses(report.plan, config.library, config.geometry, responder);
    });
    const std::string stats_stage = fmt::format("stats/{}", to_string(source));
    a.fit = in_stage(stats_stage, [&] { return fit_screening_model(a.results, config.scale); });
    a.anova = in_stage(stats_stage, [&] { return model_anova(a.fit); });
    a.effects = in_stage(stats_stage, [&] { return effect_tests(a.fit); });
    report.analyses.push_back(std::move(a));
  }

  in_stage("comparison", [&] {
    std::vector<std::pair<std::string, std::vector<double>>> simulated;
    std::vector<std::pair<std::string, std::vector<double>>> calculated;
    if (config.external && std::find(config.sources.begin(), config.sources.end(), ResponseSource::external) !=
                               config.sources.end()) {
      simulated.emplace_back("external-simulated", config.external->simulated);
    }
    for (const auto& a : report.analyses) {
      if (a.source == ResponseSource::fem) simulated.emplace_back("fem", responses_of(a));
      if (a.source == ResponseSource::analytical) calculated.emplace_back("analytical", responses_of(a));
    }
    if (config.external && !config.external->calculated.empty()) {
      calculated.emplace_back("external-calculated", config.external->calculated);
    }
    for (const auto& [sim_name, sim] : simulated) {
      for (const auto& [calc_name, calc] : calculated) {
        auto rows = compare_responses(sim, calc, sim_name, calc_name);
        report.comparison.insert(report.comparison.end(), rows.begin(), rows.end());
      }
    }
    return 0;
  });

  in_stage("screening", [&] {
    ScreeningInputs inputs;
    inputs.scale = config.scale;
    inputs.source = VerdictSource::analytical;
    auto add = [&](const ScreeningInputs& in) {
      auto v = screen(config.library, config.geometry, config.criteria, in);
      report.verdicts.insert(report.verdicts.end(), v.begin(), v.end());
    };
    add(inputs);
    if (std::find(config.sources.begin(), config.sources.end(), ResponseSource::fem) != config.sources.end()) {
      inputs.source = VerdictSource::fem;
      inputs.fem = config.fem;
      add(inputs);
    }
    for (const auto& a : report.analyses) {
      if (a.source == ResponseSource::external) {
        inputs.source = VerdictSource::external_fit;
        inputs.fit = &a.fit;
        add(inputs);
      }
    }
    return 0;
  });
  return report;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out = "run,simulated_source,calculated_source,w_sim_um,w_calc_um,ratio,error_pct\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.2f},{:.2f},{:.4f},{:.2f}\n", r.run, r.simulated_source, r.calculated_source,
                       units::m_to_um(r.simulated), units::m_to_um(r.calculated), r.ratio, r.error_percent);
  }
  return out;
}

std::string report_json(const StudyReport& report, const StudyConfig& config) {
  json j;
  j["tool_version"] = report.tool_version;
  j["config_sha256"] = report.config_hash;
  j["units"] = {{"atm_pa", config.scale.atm_pa}};
  j["geometry"] = {{"base_half_width_um", units::m_to_um(report.geometry.base_half_width())},
                   {"rise_um", units::m_to_um(report.geometry.rise())},
                   {"radius_um", units::m_to_um(report.geometry.radius())},
                   {"base_angle_deg", report.geometry.base_angle_deg()}};
  json plan = json::array();
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& r = report.plan.realized[i];
    plan.push_back({{"run", i + 1},
                    {"material", r.material},
                    {"thickness_um", units::m_to_um(r.thickness)},
                    {"pressure_atm", config.scale.to_atm(r.pressure)},
                    {"codes", report.plan.codes[i]}});
  }
  j["plan"] = plan;
  json sources = json::array();
  for (const auto& a : report.analyses) {
    json responses = json::array();
    for (const auto& r : a.results) responses.push_back(units::m_to_um(r.response));
    json effects = json::array();
    for (const auto& e : a.effects.rows) {
      effects.push_back({{"source", e.source},
                         {"nparm", e.nparm},
                         {"df", e.df},
                         {"ss", e.ss},
                         {"f", std::isfinite(e.f) ? json(e.f) : json(nullptr)},
                         {"p", e.p}});
    }
    json anova = json::array();
    for (const auto& row : a.anova.rows) {
      anova.push_back({{"source", row.source},
                       {"df", row.df},
                       {"ss", row.ss},
                       {"ms", optional_json(row.ms)},
                       {"f", row.f && std::isfinite(*row.f) ? json(*row.f) : json(nullptr)},
                       {"p", optional_json(row.p)}});
    }
    sources.push_back({{"source", to_string(a.source)},
                       {"responses_um", responses},
                       {"fit",
                        {{"material_levels", a.fit.material_levels},
                         {"material_means_um", a.fit.material_means},
                         {"grand_mean_um", a.fit.grand_mean},
                         {"thickness_slope_um_per_um", a.fit.thickness_slope},
                         {"pressure_slope_um_per_atm", a.fit.pressure_slope},
                         {"dfe", a.fit.dfe},
                         {"sse", a.fit.sse}}},
                       {"anova", anova},
                       {"effects", effects},
                       {"degenerate", a.effects.degenerate},
                       {"most_sensitive", a.effects.most_sensitive().source}});
  }
  j["sources"] = sources;
  json comparison = json::array();
  for (const auto& r : report.comparison) {
    comparison.push_back({{"run", r.run},
                          {"simulated_source", r.simulated_source},
                          {"calculated_source", r.calculated_source},
                          {"w_sim_um", units::m_to_um(r.simulated)},
                          {"w_calc_um", units::m_to_um(r.calculated)},
                          {"ratio", r.ratio},
                          {"error_pct", r.error_percent}});
  }
  j["comparison"] = comparison;
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"material", v.material},
                        {"source", to_string(v.source)},
                        {"min_thickness_um", v.min_feasible_thickness
                                                 ? json(units::m_to_um(*v.min_feasible_thickness))
                                                 : json(nullptr)},
                        {"worst_case_deflection_um", units::m_to_um(v.worst_case_deflection)},
                        {"classification", to_string(v.classification)}});
  }
  j["verdicts"] = verdicts;
  json best_by_source = json::object();
  for (const VerdictSource s : {VerdictSource::analytical, VerdictSource::fem, VerdictSource::external_fit}) {
    std::vector<Verdict> subset;
    std::copy_if(report.verdicts.begin(), report.verdicts.end(), std::back_inserter(subset),
                 [s](const Verdict& v) { return v.source == s; });
    if (subset.empty()) continue;
    const auto b = best(subset);
    best_by_source[std::string(to_string(s))] = b ? json(b->material) : json(nullptr);
  }
  j["best_material"] = best_by_source;
  return j.dump(2) + "\n";
}

void write_study(const StudyReport& report, const StudyConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "plan.csv", plan_csv(report.plan, config.scale));
  for (const auto& a : report.analyses) {
    const std::string name(to_string(a.source));
    write_file(out_dir / fmt::format("responses_{}.csv", name), responses_csv(a.results, a.source, config.scale));
    write_file(out_dir / fmt::format("anova_{}.csv", name), anova_csv(a.anova));
    write_file(out_dir / fmt::format("anova_{}.json", name), anova_json(a.anova));
    write_file(out_dir / fmt::format("effects_{}.csv", name), effects_csv(a.effects));
    write_file(out_dir / fmt::format("effects_{}.json", name), effects_json(a.effects));
  }
  write_file(out_dir / "verdicts.csv", verdicts_csv(report.verdicts));
  write_file(out_dir / "verdicts.json", verdicts_json(report.verdicts));
  write_file(out_dir / "comparison.csv", comparison_csv(report.comparison));
  for (const auto& m : config.library) {
    const auto curve = thickness_profile(m, config.geometry, config.criteria.max_pressure,
                                         config.criteria.thickness_range, config.profile_points,
                                         config.criteria.deflection_limit);
    const std::string stem = file_stem(m.name);
    write_file(out_dir / fmt::format("profile_{}.csv", stem), thickness_profile_csv(curve));
    write_file(out_dir / fmt::format("profile_{}.svg", stem),
               thickness_profile_svg(curve, config.criteria.deflection_limit,
                                     fmt::format("{} at {:g} atm", m.name,
                                                 config.scale.to_atm(config.criteria.max_pressure))));
  }
  write_file(out_dir / "report.json", report_json(report, config));
}

StudyReport run_study_to(const StudyConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto marker = out_dir / "STALE";
  std::filesystem::remove(marker);
  try {
    StudyReport report = run_study(config);
    in_stage("write", [&] {
      write_study(report, config, out_dir);
      return 0;
    });
    return report;
  } catch (const Error& e) {
    write_file(marker, fmt::format("outputs in this directory are stale: {}\n", e.what()));
    throw;
  }
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string file_stem(std::string_view name) {
  std::string stem;
  for (const char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      stem.push_back(static_cast<char>(std::tolower(u)));
    } else if (!stem.empty() && stem.back() != '_') {
      stem.push_back('_');
    }
  }
  while (!stem.empty() && stem.back() == '_') stem.pop_back();
  return stem.empty() ? "material" : stem;
}

}  // namespace globtop
