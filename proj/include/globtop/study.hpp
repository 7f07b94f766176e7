#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "globtop/doe.hpp"
#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"
#include "globtop/screening.hpp"
#include "globtop/stats.hpp"

namespace globtop {

/// Per-run responses supplied from outside (e.g. a published table), m.
struct ExternalResponses {
  std::vector<double> simulated;
  std::vector<double> calculated;  // optional, only used for comparisons
};

struct StudyConfig {
  CapGeometry geometry = reference_cap();
  MaterialLibrary library = default_library();
  std::vector<std::string> material_levels;  // empty: library sorted by modulus
  std::array<double, 3> thickness_levels{150e-6, 200e-6, 250e-6};
  std::array<double, 3> pressure_levels{80.0 * units::kStandardAtmospherePa,
                                        90.0 * units::kStandardAtmospherePa,
                                        100.0 * units::kStandardAtmospherePa};
  ScreeningCriteria criteria;
  std::vector<ResponseSource> sources{ResponseSource::analytical, ResponseSource::fem};
  std::optional<ExternalResponses> external;
  FemSettings fem{256, fem::RimCondition::clamped};
  std::size_t profile_points = 41;
  units::PressureScale scale;
  std::string output_dir = "study_out";
  std::string config_text;  // canonical text the config hash is taken over
};

/// Parse the study JSON. Relative file references resolve against base_dir.
StudyConfig parse_study_config(std::string_view json_text, const std::filesystem::path& base_dir = ".");
StudyConfig load_study_config(const std::filesystem::path& path);

/// The published screening setup: rounded reference cap, bundled materials,
/// 150/200/250 um, 80/90/100 atm, 5 um limit, analytical and FEM sources.
std::string_view default_study_config_text();

ExperimentPlan build_plan(const StudyConfig& config);

struct ComparisonRow {
  std::size_t run = 0;
  std::string simulated_source;
  std::string calculated_source;
  double simulated = 0.0;   // m
  double calculated = 0.0;  // m
  double ratio = 0.0;       // calculated / simulated
  double error_percent = 0.0;  // (calculated / simulated - 1) * 100
};

/// Row-wise ratio and percent error of two nine-run response sets.
std::vector<ComparisonRow> compare_responses(std::span<const double> simulated,
                                             std::span<const double> calculated,
                                             std::string_view simulated_source,
                                             std::string_view calculated_source);

struct SourceAnalysis {
  ResponseSource source;
  std::vector<RunResult> results;
  LinearModelFit fit;
  AnovaTable anova;
  EffectTests effects;
};

struct StudyReport {
  CapGeometry geometry;
  ExperimentPlan plan;
  std::vector<SourceAnalysis> analyses;
  std::vector<ComparisonRow> comparison;
  std::vector<Verdict> verdicts;
  std::string config_hash;  // SHA-256 of the config text
  std::string tool_version;

  const SourceAnalysis& analysis(ResponseSource source) const;
};

/// Geometry, plan, responses per source, statistics, screening and
/// comparisons. Stage failures are rethrown with the stage name attached.
StudyReport run_study(const StudyConfig& config);

/// Write every artifact of the report into out_dir.
void write_study(const StudyReport& report, const StudyConfig& config, const std::filesystem::path& out_dir);

/// run_study + write_study. On failure a STALE marker naming the failed
/// stage is left in out_dir and the error is rethrown.
StudyReport run_study_to(const StudyConfig& config, const std::filesystem::path& out_dir);

std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string report_json(const StudyReport& report, const StudyConfig& config);

std::string sha256_hex(std::string_view text);

/// Lowercase alphanumeric file-name stem, e.g. "Parylene C" -> "parylene_c".
std::string file_stem(std::string_view name);

}  // namespace globtop
