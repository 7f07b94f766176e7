#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "globtop/doe.hpp"

namespace globtop {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// P(X <= F) for X ~ F(d1, d2).
double f_cdf(double f, double d1, double d2);

/// P(X > F) for X ~ F(d1, d2), evaluated directly (no 1 - cdf cancellation).
double f_upper_tail(double f, double d1, double d2);

struct AnovaRow {
  std::string source;
  int df = 0;
  double ss = 0.0;
  std::optional<double> ms;
  std::optional<double> f;
  std::optional<double> p;
};

struct AnovaTable {
  std::vector<AnovaRow> rows;

  const AnovaRow& row(std::string_view source) const;
};

/// Model / Error / Total table from printed sums of squares.
AnovaTable anova_from_components(double ss_model, int df_model, double ss_error, int df_error);

/// Least-squares screening model on an L9 result set:
/// intercept + material (2-df treatment contrast) + centred thickness +
/// centred pressure.
///
/// The fit works in table units: responses and thickness in um, pressure
/// in atm, so sums of squares are directly comparable with printed tables.
struct LinearModelFit {
  std::array<std::string, 3> material_levels;  // by code -1, 0, +1
  std::array<double, 3> material_means{};      // fitted means at the covariate centre, um
  double grand_mean = 0.0;                     // um
  double thickness_center = 0.0;               // um
  double pressure_center = 0.0;                // atm
  double thickness_slope = 0.0;                // um per um
  double pressure_slope = 0.0;                 // um per atm
  std::vector<double> coefficients;            // intercept, mat(0), mat(+1), thickness, pressure
  std::vector<double> responses;
  std::vector<double> fitted;
  std::vector<double> residuals;
  int dfe = 0;
  double sse = 0.0;
  double ss_total_corrected = 0.0;
  double ss_total_uncorrected = 0.0;
  std::array<double, 3> term_ss{};  // partial SS: material, thickness, pressure
  std::array<int, 3> term_df{2, 1, 1};

  double mse() const { return sse / dfe; }
  /// Predicted response in um.
  double predict(LevelCode material, double thickness_um, double pressure_atm) const;
  LevelCode material_code(std::string_view material) const;
};

/// Throws NumericalError on a rank-deficient design.
LinearModelFit fit_screening_model(std::span<const RunResult> results,
                                   const units::PressureScale& scale = {});

/// Corrected decomposition (Model, Error, Total) followed by the
/// uncorrected total for comparison with tables that print df = n.
AnovaTable model_anova(const LinearModelFit& fit);

struct EffectTest {
  std::string source;
  int nparm = 0;
  int df = 0;
  double ss = 0.0;
  double f = 0.0;
  double p = 1.0;
};

struct EffectTests {
  std::vector<EffectTest> rows;  // material, thickness, pressure
  bool degenerate = false;       // zero residual variance

  const EffectTest& most_sensitive() const;
};

EffectTests effect_tests(const LinearModelFit& fit);

std::string anova_csv(const AnovaTable& table);
std::string anova_json(const AnovaTable& table);
std::string effects_csv(const EffectTests& tests);
std::string effects_json(const EffectTests& tests);

}  // namespace globtop
