#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "globtop/error.hpp"
#include "globtop/fem.hpp"
#include "globtop/geometry.hpp"
#include "globtop/materials.hpp"
#include "globtop/shell_model.hpp"
#include "globtop/units.hpp"

using namespace globtop;
using namespace globtop::fem;

namespace {

constexpr double kAtm = units::kStandardAtmospherePa;
const Material kCarbonEpoxy{"Carbon epoxy resin", 70.0, 0.4};

double max_abs(const std::array<double, 36>& k) {
  double m = 0.0;
  for (double v : k) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("uniform meridian subdivision") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 4);
  REQUIRE(mesh.nodes.size() == 5);
  const std::array<double, 5> deg{0.0, 5.875, 11.75, 17.625, 23.5};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(units::rad_to_deg(mesh.nodes[i].phi) == doctest::Approx(deg[i]).epsilon(1e-12));
  }
  CHECK(mesh.nodes.front().phi == 0.0);
  CHECK(mesh.nodes.back().phi == reference_cap().base_angle());
  CHECK(mesh.dof_count() == 15);
  CHECK_THROWS_AS(mesh_cap(reference_cap(), 3), DomainError);
}

TEST_CASE("element arc lengths sum to the meridian length") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 64);
  double arc = 0.0;
  double chord = 0.0;
  for (const auto& el : mesh.elements) {
    arc += el.arc_length;
    chord += el.length;
    CHECK(el.length < el.arc_length);
  }
  const double expected = 3010e-6 * units::deg_to_rad(23.5);
  CHECK(units::m_to_um(expected) == doctest::Approx(1234.6).epsilon(1e-4));
  CHECK(std::abs(arc - expected) / expected < 1e-9);
  CHECK(std::abs(chord - expected) / expected < 1e-5);
  for (std::size_t i = 1; i < mesh.nodes.size(); ++i) CHECK(mesh.nodes[i].s > mesh.nodes[i - 1].s);
}

TEST_CASE("element stiffness is symmetric and positive semi-definite") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 16);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto k = element_stiffness(mesh, e, 150e-6, kCarbonEpoxy);
    const double scale = max_abs(k);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(k[i * 6 + j] - k[j * 6 + i]) <= 1e-12 * scale);
    }
    for (int trial = 0; trial < 20; ++trial) {
      std::array<double, 6> x{};
      for (auto& v : x) v = n(rng);
      double energy = 0.0;
      double norm = 0.0;
      for (std::size_t i = 0; i < 6; ++i) {
        norm += x[i] * x[i];
        for (std::size_t j = 0; j < 6; ++j) energy += x[i] * k[i * 6 + j] * x[j];
      }
      CHECK(energy >= -1e-10 * scale * norm);
    }
  }
}

TEST_CASE("rigid axial translation is strain free") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 8);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto k = element_stiffness(mesh, e, 200e-6, kCarbonEpoxy);
    std::array<double, 6> d{};
    for (std::size_t end = 0; end < 2; ++end) {
      const double phi = mesh.nodes[e + end].phi;
      d[end * 3 + 0] = std::sin(phi);
      d[end * 3 + 1] = std::cos(phi);
    }
    const double scale = max_abs(k);
    for (std::size_t i = 0; i < 6; ++i) {
      double f = 0.0;
      for (std::size_t j = 0; j < 6; ++j) f += k[i * 6 + j] * d[j];
      CHECK(std::abs(f) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("zero load gives an identically zero field") {
  for (RimCondition bc : {RimCondition::clamped, RimCondition::pinned}) {
    const FemSolution s = solve_case(mesh_cap(reference_cap(), 32), 150e-6, kCarbonEpoxy, 0.0, bc);
    for (const auto& n : s.field) {
      CHECK(n.u == 0.0);
      CHECK(n.w == 0.0);
      CHECK(n.rotation == 0.0);
    }
    CHECK(s.apex_deflection == 0.0);
  }
}

TEST_CASE("solution is linear in pressure and scales as 1/E") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 64);
  const FemSolution a = solve_case(mesh, 150e-6, kCarbonEpoxy, 50 * kAtm);
  const FemSolution b = solve_case(mesh, 150e-6, kCarbonEpoxy, 100 * kAtm);
  const FemSolution c = solve_case(mesh, 150e-6, Material{"soft", 35.0, 0.4}, 50 * kAtm);
  double w_scale = 0.0;
  for (const auto& n : a.field) w_scale = std::max(w_scale, std::abs(n.w));
  for (std::size_t i = 0; i < a.field.size(); ++i) {
    CHECK(std::abs(b.field[i].w - 2.0 * a.field[i].w) <= 1e-10 * w_scale * 2.0);
    CHECK(std::abs(b.field[i].u - 2.0 * a.field[i].u) <= 1e-10 * w_scale * 2.0);
    CHECK(std::abs(c.field[i].w - 2.0 * a.field[i].w) <= 1e-10 * w_scale * 2.0);
  }
  CHECK(b.apex_deflection == doctest::Approx(2.0 * a.apex_deflection).epsilon(1e-10));
}

TEST_CASE("boundary and symmetry constraints hold exactly") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 32);
  const FemSolution clamped = solve_case(mesh, 150e-6, kCarbonEpoxy, 100 * kAtm, RimCondition::clamped);
  CHECK(clamped.field.front().u == 0.0);
  CHECK(clamped.field.front().rotation == 0.0);
  CHECK(clamped.field.back().u == 0.0);
  CHECK(clamped.field.back().w == 0.0);
  CHECK(clamped.field.back().rotation == 0.0);

  const FemSolution pinned = solve_case(mesh, 150e-6, kCarbonEpoxy, 100 * kAtm, RimCondition::pinned);
  CHECK(pinned.field.back().u == 0.0);
  CHECK(pinned.field.back().w == 0.0);
  CHECK(pinned.field.back().rotation != 0.0);
  CHECK(pinned.apex_deflection > clamped.apex_deflection);
}

TEST_CASE("rim reaction balances the applied axial load") {
  const CapGeometry g = reference_cap();
  const double p = 100 * kAtm;
  for (RimCondition bc : {RimCondition::clamped, RimCondition::pinned}) {
    const FemSolution s = solve_case(mesh_cap(g, 64), 150e-6, kCarbonEpoxy, p, bc);
    const double projected = p * std::numbers::pi * g.base_half_width() * g.base_half_width();
    CHECK(s.applied_axial_load == doctest::Approx(-projected).epsilon(1e-9));
    CHECK(s.rim_axial_reaction == doctest::Approx(-s.applied_axial_load).epsilon(1e-8));
  }
}

TEST_CASE("flat-cap limit reproduces the clamped plate") {
  const CapGeometry g = CapGeometry::from_radius_angle(1000.0, 0.005);
  const Material m{"steel", 200.0, 0.3};
  const double t = 0.01;
  const double p = 1000.0;
  const double b = g.base_half_width();
  const double d = m.youngs_modulus() * t * t * t / (12.0 * (1.0 - m.poisson_ratio * m.poisson_ratio));
  const FemSolution s = solve_case(mesh_cap(g, 128), t, m, p, RimCondition::clamped);
  CHECK(s.apex_deflection == doctest::Approx(p * std::pow(b, 4) / (64.0 * d)).epsilon(1e-4));
  const FemSolution pinned = solve_case(mesh_cap(g, 128), t, m, p, RimCondition::pinned);
  const double simply = (5.0 + m.poisson_ratio) / (1.0 + m.poisson_ratio) * p * std::pow(b, 4) / (64.0 * d);
  CHECK(pinned.apex_deflection == doctest::Approx(simply).epsilon(1e-3));
}

TEST_CASE("hemisphere interior follows the membrane solution") {
  const CapGeometry g = solve_cap(1.0, 1.0);
  const Material m{"m", 100.0, 0.3};
  const double t = 0.002;
  const double p = 1e5;
  const double membrane = p * (1.0 - m.poisson_ratio) / (2.0 * m.youngs_modulus() * t);
  const FemSolution s = solve_case(mesh_cap(g, 512), t, m, p, RimCondition::clamped);
  for (const auto& n : s.field) {
    const double deg = units::rad_to_deg(n.phi);
    if (deg < 20.0 || deg > 60.0) continue;
    CAPTURE(deg);
    CHECK((n.w - n.u / std::tan(n.phi)) == doctest::Approx(membrane).epsilon(1e-3));
  }
}

TEST_CASE("reference case lies within a factor of two of the published simulation") {
  const FemSolution s = solve_case(mesh_cap(reference_cap(), 256), 150e-6, kCarbonEpoxy, 100 * kAtm);
  const double apex_um = units::m_to_um(s.apex_deflection);
  CHECK(apex_um >= 2.5);
  CHECK(apex_um <= 9.9);
  CHECK(s.elements == 256);
  CHECK(std::isfinite(s.pivot_ratio));
  CHECK(s.pivot_ratio >= 1.0);
}

TEST_CASE("cross-model agreement over the published runs") {
  const MaterialLibrary lib = default_library();
  const std::array<const char*, 9> material{"Polyimide", "Carbon epoxy resin", "Polyimide",
                                            "Parylene C", "Polyimide", "Parylene C",
                                            "Carbon epoxy resin", "Parylene C", "Carbon epoxy resin"};
  const std::array<double, 9> t_um{250, 150, 200, 250, 150, 150, 200, 200, 250};
  const std::array<double, 9> p_atm{100, 100, 90, 80, 80, 90, 80, 100, 90};
  const ShellMesh mesh = mesh_cap(reference_cap(), 256);
  for (std::size_t i = 0; i < 9; ++i) {
    const Material& m = lib.find(material[i]);
    const double fem_w = solve_case(mesh, t_um[i] * 1e-6, m, p_atm[i] * kAtm).apex_deflection;
    const double shell_w = apex_deflection(ShellCase(reference_cap(), t_um[i] * 1e-6, m, p_atm[i] * kAtm));
    CAPTURE(i);
    CHECK(fem_w / shell_w >= 0.5);
    CHECK(fem_w / shell_w <= 2.0);
  }
}

TEST_CASE("convergence ladder") {
  const auto start = std::chrono::steady_clock::now();
  const ConvergenceReport r =
      converge(reference_cap(), 150e-6, kCarbonEpoxy, 100 * kAtm, RimCondition::clamped, 5, 32);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(r.levels.size() == 5);
  CHECK(r.levels.back().elements == 512);
  const auto& lv = r.levels;
  CHECK(std::abs(lv[3].apex_deflection - lv[4].apex_deflection) <=
        std::abs(lv[0].apex_deflection - lv[1].apex_deflection));
  CHECK(r.contracting);
  CHECK(r.monotone);
  CHECK(r.observed_order >= 1.5);
  CHECK(r.extrapolation_drift() < 0.01);
  CHECK(seconds < 10.0);
  CHECK(convergence_json(r).find("\"observed_order\"") != std::string::npos);
  CHECK_THROWS_AS(converge(reference_cap(), 150e-6, kCarbonEpoxy, 1e6, RimCondition::clamped, 2), DomainError);
}

TEST_CASE("input and assembly errors") {
  const ShellMesh mesh = mesh_cap(reference_cap(), 8);
  CHECK_THROWS_AS(solve_case(mesh, 0.0, kCarbonEpoxy, 1e6), DomainError);
  CHECK_THROWS_AS(solve_case(mesh, 1e-4, kCarbonEpoxy, -1.0), DomainError);
  try {
    solve_case(mesh, 1e-4, Material{"broken", std::nan(""), 0.3}, 1e6);
    FAIL("expected an assembly error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("element 0") != std::string::npos);
  }
  CHECK(parse_rim_condition("pinned") == RimCondition::pinned);
  CHECK(to_string(RimCondition::clamped) == "clamped");
  CHECK_THROWS_AS(parse_rim_condition("free"), ValidationError);
}

TEST_CASE("solution CSV") {
  const FemSolution s = solve_case(mesh_cap(reference_cap(), 4), 150e-6, kCarbonEpoxy, 100 * kAtm);
  const std::string csv = solution_csv(s);
  CHECK(csv.rfind("phi_deg,u_um,w_um,rotation_rad\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
