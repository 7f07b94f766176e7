#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"
#include "globtop/shell_model.hpp"
#include "globtop/units.hpp"

namespace globtop {

enum class FactorKind { categorical, continuous };

/// A three-level screening factor.
///
/// Categorical levels carry a label and an ordering value (Young's modulus
/// for the material factor); continuous levels carry SI values. Values are
/// strictly increasing in level order: code -1, 0, +1.
struct Factor {
  std::string name;
  FactorKind kind = FactorKind::continuous;
  std::vector<std::string> labels;
  std::vector<double> values;
};

Factor material_factor(std::span<const Material> materials);
Factor thickness_factor(std::span<const double> thickness_m);
Factor pressure_factor(std::span<const double> pressure_pa);

using LevelCode = int;  // -1, 0, +1

struct RealizedRun {
  std::string material;
  double thickness = 0.0;  // m
  double pressure = 0.0;   // Pa
};

/// The nine-run, three-column orthogonal array and its concrete runs.
struct ExperimentPlan {
  std::array<Factor, 3> factors;  // material, thickness, pressure
  std::array<std::array<LevelCode, 3>, 9> codes;
  std::array<RealizedRun, 9> realized;
};

/// Rows of the three-factor L9 array in the published run order.
const std::array<std::array<LevelCode, 3>, 9>& l9_codes();

/// Factors in the order material, thickness, pressure. Throws
/// ValidationError unless there are exactly 3 factors of 3 levels each.
ExperimentPlan build_l9(std::span<const Factor> factors);

/// Each ordered level pair of every column pair occurs exactly once and
/// every level occurs three times per column.
bool is_orthogonal(const std::array<std::array<LevelCode, 3>, 9>& codes);

enum class ResponseSource { analytical, fem, external };

std::string_view to_string(ResponseSource source);
ResponseSource parse_response_source(std::string_view text);

struct RunResult {
  std::size_t run = 0;  // 1-based
  RealizedRun realized;
  std::array<LevelCode, 3> codes{};
  double response = 0.0;  // m
};

using Responder = std::function<double(std::size_t run, const ShellCase&)>;

/// Evaluate the responder on all nine cases, in run order. Responder
/// failures are rethrown as the same error category with the run attached.
std::vector<RunResult> realize_responses(const ExperimentPlan& plan, const MaterialLibrary& library,
                                         const CapGeometry& geom, const Responder& responder);

/// Responder returning prescribed per-run values (metres), e.g. published data.
Responder external_responder(std::span<const double> responses_m);

std::string plan_csv(const ExperimentPlan& plan, const units::PressureScale& scale);
std::string responses_csv(std::span<const RunResult> results, ResponseSource source,
                          const units::PressureScale& scale);

/// Parse a responses CSV (as written by responses_csv) back into results.
std::vector<RunResult> parse_responses_csv(std::string_view text, const units::PressureScale& scale);

}  // namespace globtop
