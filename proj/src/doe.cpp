#include "globtop/doe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "globtop/error.hpp"

namespace globtop {

namespace {

constexpr std::array<std::array<LevelCode, 3>, 9> kL9 = {{
    {-1, +1, +1},
    {+1, -1, +1},
    {-1, 0, 0},
    {0, +1, -1},
    {-1, -1, -1},
    {0, -1, 0},
    {+1, 0, -1},
    {0, 0, +1},
    {+1, +1, 0},
}};

std::size_t level_index(LevelCode code) { return static_cast<std::size_t>(code + 1); }

void validate_factor(const Factor& f) {
  if (f.values.size() != 3) {
    throw ValidationError(
        fmt::format("factor '{}' must have exactly 3 levels (got {})", f.name, f.values.size()));
  }
  if (f.kind == FactorKind::categorical && f.labels.size() != 3) {
    throw ValidationError(fmt::format("categorical factor '{}' needs 3 level labels", f.name));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (!std::isfinite(f.values[i]) || f.values[i] <= 0.0) {
      throw ValidationError(fmt::format("factor '{}': level {} must be positive", f.name, i));
    }
  }
  if (!(f.values[0] < f.values[1] && f.values[1] < f.values[2])) {
    throw ValidationError(fmt::format("factor '{}': levels must be strictly increasing", f.name));
  }
  if (f.kind == FactorKind::categorical) {
    if (f.labels[0] == f.labels[1] || f.labels[1] == f.labels[2] || f.labels[0] == f.labels[2]) {
      throw ValidationError(fmt::format("factor '{}': level labels must be distinct", f.name));
    }
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
  try {
    std::size_t used = 0;
    const double value = std::stod(cell, &used);
    if (used != cell.size()) {
      throw std::invalid_argument(cell);
    }
    return value;
  } catch (const std::exception&) {
    throw ValidationError(
        fmt::format("responses CSV line {}: column {} is not a number ('{}')", line_no, column, cell));
  }
}

}  // namespace

Factor material_factor(std::span<const Material> materials) {
  Factor f{"Young's Modulus", FactorKind::categorical, {}, {}};
  for (const auto& m : materials) {
    f.labels.push_back(m.name);
    f.values.push_back(m.youngs_modulus());
  }
  return f;
}

Factor thickness_factor(std::span<const double> thickness_m) {
  return {"Thickness", FactorKind::continuous, {}, {thickness_m.begin(), thickness_m.end()}};
}

Factor pressure_factor(std::span<const double> pressure_pa) {
  return {"Pressure", FactorKind::continuous, {}, {pressure_pa.begin(), pressure_pa.end()}};
}

const std::array<std::array<LevelCode, 3>, 9>& l9_codes() { return kL9; }

ExperimentPlan build_l9(std::span<const Factor> factors) {
  if (factors.size() != 3) {
    throw ValidationError(fmt::format("L9 plan needs exactly 3 factors (got {})", factors.size()));
  }
  for (const auto& f : factors) {
    validate_factor(f);
  }
  if (factors[0].kind != FactorKind::categorical || factors[1].kind != FactorKind::continuous ||
      factors[2].kind != FactorKind::continuous) {
    throw ValidationError("L9 plan expects factors (categorical material, thickness, pressure)");
  }
  ExperimentPlan plan{{factors[0], factors[1], factors[2]}, kL9, {}};
  for (std::size_t run = 0; run < 9; ++run) {
    const auto& row = kL9[run];
    plan.realized[run] = RealizedRun{factors[0].labels[level_index(row[0])],
                                     factors[1].values[level_index(row[1])],
                                     factors[2].values[level_index(row[2])]};
  }
  return plan;
}

bool is_orthogonal(const std::array<std::array<LevelCode, 3>, 9>& codes) {
  for (std::size_t col = 0; col < 3; ++col) {
    std::array<int, 3> counts{};
    for (const auto& row : codes) {
      if (row[col] < -1 || row[col] > 1) {
        return false;
      }
      ++counts[level_index(row[col])];
    }
    if (counts != std::array<int, 3>{3, 3, 3}) {
      return false;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      std::array<std::array<int, 3>, 3> pairs{};
      for (const auto& row : codes) {
        ++pairs[level_index(row[i])][level_index(row[j])];
      }
      for (const auto& r : pairs) {
        for (const int n : r) {
          if (n != 1) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

std::string_view to_string(ResponseSource source) {
  switch (source) {
    case ResponseSource::analytical:
      return "analytical";
    case ResponseSource::fem:
      return "fem";
    case ResponseSource::external:
      return "external";
  }
  return "unknown";
}

ResponseSource parse_response_source(std::string_view text) {
  if (text == "analytical") return ResponseSource::analytical;
  if (text == "fem") return ResponseSource::fem;
  if (text == "external") return ResponseSource::external;
  throw ValidationError(fmt::format("unknown response source '{}'", text));
}

std::vector<RunResult> realize_responses(const ExperimentPlan& plan, const MaterialLibrary& library,
                                         const CapGeometry& geom, const Responder& responder) {
  std::vector<RunResult> results;
  results.reserve(9);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& run = plan.realized[i];
    const std::size_t run_number = i + 1;
    double response = 0.0;
    try {
      const ShellCase c(geom, run.thickness, library.find(run.material), run.pressure);
      response = responder(run_number, c);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("run {}: {}", run_number, e.what()));
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("run {}: {}", run_number, e.what()));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("run {}: {}", run_number, e.what()));
    }
    if (!std::isfinite(response)) {
      throw NumericalError(fmt::format("run {}: responder returned a non-finite value", run_number));
    }
    results.push_back({run_number, run, plan.codes[i], response});
  }
  return results;
}

Responder external_responder(std::span<const double> responses_m) {
  if (responses_m.size() != 9) {
    throw ValidationError(
        fmt::format("external responses need 9 values (got {})", responses_m.size()));
  }
  std::vector<double> values(responses_m.begin(), responses_m.end());
  return [values](std::size_t run, const ShellCase&) {
    if (run < 1 || run > values.size()) {
      throw DomainError(fmt::format("no external response for run {}", run));
    }
    return values[run - 1];
  };
}

std::string plan_csv(const ExperimentPlan& plan, const units::PressureScale& scale) {
  std::string out = "run,material,thickness_um,pressure_atm,code_material,code_thickness,code_pressure\n";
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& r = plan.realized[i];
    const auto& c = plan.codes[i];
    out += fmt::format("{},{},{:.2f},{:.2f},{},{},{}\n", i + 1, r.material, units::m_to_um(r.thickness),
                       scale.to_atm(r.pressure), c[0], c[1], c[2]);
  }
  return out;
}

std::string responses_csv(std::span<const RunResult> results, ResponseSource source,
                          const units::PressureScale& scale) {
  std::string out =
      "run,material,thickness_um,pressure_atm,code_material,code_thickness,code_pressure,response_um,"
      "source\n";
  for (const auto& r : results) {
    out += fmt::format("{},{},{:.2f},{:.2f},{},{},{},{:.6f},{}\n", r.run, r.realized.material,
                       units::m_to_um(r.realized.thickness), scale.to_atm(r.realized.pressure),
                       r.codes[0], r.codes[1], r.codes[2], units::m_to_um(r.response),
                       to_string(source));
  }
  return out;
}

std::vector<RunResult> parse_responses_csv(std::string_view text, const units::PressureScale& scale) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("responses CSV is empty");
  }
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    column[header[i]] = i;
  }
  const std::array<std::string, 8> required = {"run",          "material",       "thickness_um",
                                               "pressure_atm", "code_material",  "code_thickness",
                                               "code_pressure", "response_um"};
  for (const auto& name : required) {
    if (!column.contains(name)) {
      throw ValidationError(fmt::format("responses CSV: missing column {}", name));
    }
  }
  std::vector<RunResult> results;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError(fmt::format("responses CSV line {}: expected {} cells, got {}", line_no,
                                        header.size(), cells.size()));
    }
    auto num = [&](const std::string& name) { return parse_number(cells[column[name]], line_no, name); };
    RunResult r;
    r.run = static_cast<std::size_t>(num("run"));
    r.realized.material = cells[column["material"]];
    r.realized.thickness = units::um_to_m(num("thickness_um"));
    r.realized.pressure = scale.to_pa(num("pressure_atm"));
    r.codes = {static_cast<LevelCode>(num("code_material")),
               static_cast<LevelCode>(num("code_thickness")),
               static_cast<LevelCode>(num("code_pressure"))};
    for (const LevelCode code : r.codes) {
      if (code < -1 || code > 1) {
        throw ValidationError(fmt::format("responses CSV line {}: level code out of range", line_no));
      }
    }
    r.response = units::um_to_m(num("response_um"));
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace globtop
