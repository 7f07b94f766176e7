#include "globtop/stats.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <json.hpp>

#include "globtop/error.hpp"

namespace globtop {

namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEpsilon) {
      return h;
    }
  }
  throw NumericalError(fmt::format("incomplete beta did not converge (a={}, b={}, x={})", a, b, x));
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

void check_df(double d1, double d2) {
  if (!(d1 >= 1.0) || !(d2 >= 1.0) || !std::isfinite(d1) || !std::isfinite(d2)) {
    throw DomainError(fmt::format("F distribution degrees of freedom must be >= 1 (got {}, {})", d1, d2));
  }
}

struct LeastSquares {
  Eigen::VectorXd beta;
  Eigen::VectorXd residual;
  double sse;
};

LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) {
    throw NumericalError(
        fmt::format("screening model design is rank deficient (rank {} < {})", qr.rank(), x.cols()));
  }
  LeastSquares ls;
  ls.beta = qr.solve(y);
  ls.residual = y - x * ls.beta;
  ls.sse = ls.residual.squaredNorm();
  return ls;
}

Eigen::MatrixXd drop_columns(const Eigen::MatrixXd& x, std::initializer_list<Eigen::Index> drop) {
  Eigen::MatrixXd reduced(x.rows(), x.cols() - static_cast<Eigen::Index>(drop.size()));
  Eigen::Index out = 0;
  for (Eigen::Index col = 0; col < x.cols(); ++col) {
    if (std::find(drop.begin(), drop.end(), col) == drop.end()) {
      reduced.col(out++) = x.col(col);
    }
  }
  return reduced;
}

double zero_tolerance(const LinearModelFit& fit) {
  return 1e-20 * std::max(fit.ss_total_uncorrected, DBL_MIN);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError(fmt::format("incomplete beta needs a, b > 0 (got {}, {})", a, b));
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(fmt::format("incomplete beta argument {} outside [0, 1]", x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double f, double d1, double d2) {
  check_df(d1, d2);
  if (!(f >= 0.0)) {
    throw DomainError(fmt::format("F statistic must be non-negative (got {})", f));
  }
  if (std::isinf(f)) return 1.0;
  return regularized_incomplete_beta(0.5 * d1, 0.5 * d2, d1 * f / (d1 * f + d2));
}

double f_upper_tail(double f, double d1, double d2) {
  check_df(d1, d2);
  if (!(f >= 0.0)) {
    throw DomainError(fmt::format("F statistic must be non-negative (got {})", f));
  }
  if (std::isinf(f)) return 0.0;
  return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

const AnovaRow& AnovaTable::row(std::string_view source) const {
  for (const auto& r : rows) {
    if (r.source == source) return r;
  }
  throw DomainError(fmt::format("ANOVA table has no row '{}'", source));
}

AnovaTable anova_from_components(double ss_model, int df_model, double ss_error, int df_error) {
  if (!(ss_model > 0.0) || !(ss_error > 0.0) || df_model < 1 || df_error < 1 ||
      !std::isfinite(ss_model) || !std::isfinite(ss_error)) {
    throw DomainError("ANOVA components must be positive");
  }
  const double ms_model = ss_model / df_model;
  const double ms_error = ss_error / df_error;
  const double f = ms_model / ms_error;
  AnovaTable t;
  t.rows.push_back({"Model", df_model, ss_model, ms_model, f, f_upper_tail(f, df_model, df_error)});
  t.rows.push_back({"Error", df_error, ss_error, ms_error, std::nullopt, std::nullopt});
  t.rows.push_back({"Total", df_model + df_error, ss_model + ss_error, std::nullopt, std::nullopt,
                    std::nullopt});
  return t;
}

double LinearModelFit::predict(LevelCode material, double thickness_um, double pressure_atm) const {
  if (material < -1 || material > 1) {
    throw DomainError(fmt::format("material level code {} out of range", material));
  }
  return material_means[static_cast<std::size_t>(material + 1)] +
         thickness_slope * (thickness_um - thickness_center) +
         pressure_slope * (pressure_atm - pressure_center);
}

LevelCode LinearModelFit::material_code(std::string_view material) const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (material_levels[i] == material) return static_cast<LevelCode>(i) - 1;
  }
  throw ValidationError(fmt::format("material '{}' is not a level of the fitted model", material));
}

LinearModelFit fit_screening_model(std::span<const RunResult> results,
                                   const units::PressureScale& scale) {
  if (results.size() != 9) {
    throw ValidationError(fmt::format("screening fit needs 9 L9 results (got {})", results.size()));
  }
  LinearModelFit fit;
  const auto n = static_cast<Eigen::Index>(results.size());
  Eigen::VectorXd y(n);
  Eigen::VectorXd thickness(n);
  Eigen::VectorXd pressure(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    if (!std::isfinite(r.response)) {
      throw DomainError(fmt::format("run {}: non-finite response", r.run));
    }
    y(i) = units::m_to_um(r.response);
    thickness(i) = units::m_to_um(r.realized.thickness);
    pressure(i) = scale.to_atm(r.realized.pressure);
    auto& label = fit.material_levels[static_cast<std::size_t>(r.codes[0] + 1)];
    if (label.empty()) {
      label = r.realized.material;
    } else if (label != r.realized.material) {
      throw ValidationError(fmt::format("run {}: material code {} maps to both '{}' and '{}'", r.run,
                                        r.codes[0], label, r.realized.material));
    }
  }
  fit.thickness_center = thickness.mean();
  fit.pressure_center = pressure.mean();
  fit.grand_mean = y.mean();

  // Centre the response so that a constant shift only moves the intercept.
  const Eigen::VectorXd yc = y.array() - fit.grand_mean;

  Eigen::MatrixXd x(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = r.codes[0] == 0 ? 1.0 : 0.0;
    x(i, 2) = r.codes[0] == 1 ? 1.0 : 0.0;
    x(i, 3) = thickness(i) - fit.thickness_center;
    x(i, 4) = pressure(i) - fit.pressure_center;
  }
  const LeastSquares full = least_squares(x, yc);

  fit.coefficients = {full.beta(0) + fit.grand_mean, full.beta(1), full.beta(2), full.beta(3),
                      full.beta(4)};
  fit.material_means = {fit.coefficients[0], fit.coefficients[0] + full.beta(1),
                        fit.coefficients[0] + full.beta(2)};
  fit.thickness_slope = full.beta(3);
  fit.pressure_slope = full.beta(4);
  fit.responses.assign(y.data(), y.data() + n);
  fit.residuals.assign(full.residual.data(), full.residual.data() + n);
  fit.fitted.resize(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    fit.fitted[i] = fit.responses[i] - fit.residuals[i];
  }
  fit.dfe = static_cast<int>(n - x.cols());
  fit.sse = full.sse;
  fit.ss_total_corrected = yc.squaredNorm();
  fit.ss_total_uncorrected = y.squaredNorm();

  const std::array<std::initializer_list<Eigen::Index>, 3> term_columns = {{{1, 2}, {3}, {4}}};
  for (std::size_t term = 0; term < 3; ++term) {
    const LeastSquares reduced = least_squares(drop_columns(x, term_columns[term]), yc);
    fit.term_ss[term] = std::max(0.0, reduced.sse - full.sse);
  }
  return fit;
}

AnovaTable model_anova(const LinearModelFit& fit) {
  const int df_model = 4;
  const double ss_model = std::max(0.0, fit.ss_total_corrected - fit.sse);
  const double ms_model = ss_model / df_model;
  const double mse = fit.mse();
  const double tol = zero_tolerance(fit);
  double f = 0.0;
  double p = 1.0;
  if (fit.sse > tol) {
    f = ms_model / mse;
    p = f_upper_tail(f, df_model, fit.dfe);
  } else if (ss_model > tol) {
    f = std::numeric_limits<double>::infinity();
    p = 0.0;
  }
  AnovaTable t;
  t.rows.push_back({"Model", df_model, ss_model, ms_model, f, p});
  t.rows.push_back({"Error", fit.dfe, fit.sse, mse, std::nullopt, std::nullopt});
  t.rows.push_back({"C. Total", df_model + fit.dfe, fit.ss_total_corrected, std::nullopt, std::nullopt,
                    std::nullopt});
  t.rows.push_back({"U. Total", df_model + fit.dfe + 1, fit.ss_total_uncorrected, std::nullopt,
                    std::nullopt, std::nullopt});
  return t;
}

const EffectTest& EffectTests::most_sensitive() const {
  if (rows.empty()) {
    throw DomainError("no effect tests");
  }
  return *std::min_element(rows.begin(), rows.end(), [](const EffectTest& a, const EffectTest& b) {
    return a.p < b.p || (a.p == b.p && a.f > b.f);
  });
}

EffectTests effect_tests(const LinearModelFit& fit) {
  static const std::array<std::string, 3> names = {"Young's Modulus", "Thickness", "Pressure"};
  EffectTests tests;
  const double tol = zero_tolerance(fit);
  tests.degenerate = fit.sse <= tol;
  for (std::size_t term = 0; term < 3; ++term) {
    EffectTest e;
    e.source = names[term];
    e.nparm = fit.term_df[term];
    e.df = fit.term_df[term];
    e.ss = fit.term_ss[term];
    if (e.ss <= tol) {
      e.f = 0.0;
      e.p = 1.0;
    } else if (tests.degenerate) {
      e.f = std::numeric_limits<double>::infinity();
      e.p = 0.0;
    } else {
      e.f = (e.ss / e.df) / fit.mse();
      e.p = f_upper_tail(e.f, e.df, fit.dfe);
    }
    tests.rows.push_back(e);
  }
  return tests;
}

std::string anova_csv(const AnovaTable& table) {
  std::string out = "source,df,ss,ms,f,p\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string(); };
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{:.4f},{},{},{}\n", r.source, r.df, r.ss, cell(r.ms), cell(r.f), cell(r.p));
  }
  return out;
}

std::string anova_json(const AnovaTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json j;
    j["source"] = r.source;
    j["df"] = r.df;
    j["ss"] = r.ss;
    j["ms"] = r.ms ? nlohmann::json(*r.ms) : nlohmann::json(nullptr);
    j["f"] = r.f ? nlohmann::json(*r.f) : nlohmann::json(nullptr);
    j["p"] = r.p ? nlohmann::json(*r.p) : nlohmann::json(nullptr);
    rows.push_back(std::move(j));
  }
  return nlohmann::json{{"anova", rows}}.dump(2) + "\n";
}

std::string effects_csv(const EffectTests& tests) {
  std::string out = "source,nparm,df,ss,f,p\n";
  for (const auto& e : tests.rows) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f}\n", e.source, e.nparm, e.df, e.ss, e.f, e.p);
  }
  return out;
}

std::string effects_json(const EffectTests& tests) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : tests.rows) {
    // JSON has no infinity; a degenerate fit reports F as null.
    rows.push_back({{"source", e.source},
                    {"nparm", e.nparm},
                    {"df", e.df},
                    {"ss", e.ss},
                    {"f", std::isfinite(e.f) ? nlohmann::json(e.f) : nlohmann::json(nullptr)},
                    {"p", e.p}});
  }
  return nlohmann::json{{"effects", rows}, {"degenerate", tests.degenerate}}.dump(2) + "\n";
}

}  // namespace globtop
