#include <doctest.h>

#include <cmath>
#include <random>

#include "globtop/error.hpp"
#include "globtop/geometry.hpp"
#include "globtop/units.hpp"

using namespace globtop;

TEST_CASE("reference dome solves to the closed form") {
  const CapGeometry g = solve_cap(1200e-6, 250e-6);
  CHECK(units::m_to_um(g.radius()) == doctest::Approx(3005.0).epsilon(1e-12));
  CHECK(g.base_angle_deg() == doctest::Approx(23.536577864041289).epsilon(1e-12));
  CHECK(units::m_to_um(g.radius()) >= 2990.0);
  CHECK(units::m_to_um(g.radius()) <= 3020.0);
}

TEST_CASE("shallow and hemispherical caps") {
  const CapGeometry flat = solve_cap(2000e-6, 100e-6);
  CHECK(units::m_to_um(flat.radius()) == doctest::Approx(20050.0).epsilon(1e-12));
  CHECK(flat.base_angle_deg() == doctest::Approx(5.7248104522234951).epsilon(1e-12));

  const CapGeometry hemi = solve_cap(1000e-6, 1000e-6);
  CHECK(hemi.radius() == 1000e-6);
  CHECK(hemi.base_angle_deg() == 90.0);
}

TEST_CASE("invalid caps are rejected") {
  CHECK_THROWS_AS(solve_cap(0.0, 250e-6), DomainError);
  CHECK_THROWS_AS(solve_cap(1200e-6, -1.0), DomainError);
  CHECK_THROWS_AS(solve_cap(NAN, 250e-6), DomainError);
  CHECK_THROWS_AS(solve_cap(1200e-6, INFINITY), DomainError);
  CHECK_THROWS_AS(solve_cap(100e-6, 250e-6), DomainError);
  CHECK_THROWS_AS(CapGeometry::from_radius_angle(3010e-6, 91.0), DomainError);
  CHECK_THROWS_AS(CapGeometry::from_radius_angle(3010e-6, 0.0), DomainError);
}

TEST_CASE("cap identities round-trip on random caps") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> width(1e-5, 1e-2);
  std::uniform_real_distribution<double> fraction(1e-3, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double b = width(rng);
    const double h = b * fraction(rng);
    const CapGeometry g = solve_cap(b, h);
    CHECK(g.radius() * std::sin(g.base_angle()) == doctest::Approx(b).epsilon(1e-12));
    CHECK(g.radius() * (1.0 - std::cos(g.base_angle())) == doctest::Approx(h).epsilon(1e-12));
    CHECK(g.base_angle() > 0.0);
    CHECK(g.base_angle() <= M_PI / 2);
  }
}

TEST_CASE("radius decreases strictly with rise at fixed width") {
  const double b = 1200e-6;
  double previous = INFINITY;
  for (int i = 1; i <= 200; ++i) {
    const double a = solve_cap(b, b * i / 200.0).radius();
    CHECK(a < previous);
    previous = a;
  }
}

TEST_CASE("reference preset and its exact counterpart") {
  const CapGeometry p = reference_cap();
  CHECK(units::m_to_um(p.radius()) == doctest::Approx(3010.0).epsilon(1e-14));
  CHECK(p.base_angle_deg() == doctest::Approx(23.5).epsilon(1e-14));
  CHECK(p.base_half_width() == doctest::Approx(p.radius() * std::sin(p.base_angle())).epsilon(1e-14));
  CHECK(p.arc_length() == doctest::Approx(3010e-6 * 0.41015237421866746).epsilon(1e-12));

  const CapGeometry e = exact_reference_cap();
  CHECK(units::m_to_um(e.base_half_width()) == doctest::Approx(1200.0));
  CHECK(units::m_to_um(e.rise()) == doctest::Approx(250.0));
}

TEST_CASE("thinness ratio") {
  const ThinnessRatio reference = thinness_ratio(reference_cap(), 250e-6);
  CHECK(reference.ratio == doctest::Approx(0.0830565).epsilon(1e-5));
  CHECK_FALSE(reference.warning);

  const ThinnessRatio thick = thinness_ratio(exact_reference_cap(), 350e-6);
  CHECK(thick.ratio == doctest::Approx(0.11647).epsilon(1e-4));
  CHECK(thick.warning);

  CHECK_THROWS_AS(thinness_ratio(reference_cap(), 0.0), DomainError);
}
