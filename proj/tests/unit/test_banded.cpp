#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "globtop/banded.hpp"
#include "globtop/error.hpp"

using globtop::NumericalError;
using globtop::SymmetricBandMatrix;

namespace {

SymmetricBandMatrix random_spd(std::size_t n, std::size_t kd, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymmetricBandMatrix a(n, kd);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (i >= kd ? i - kd : 0); j < i; ++j) a.add(i, j, u(rng));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = (i >= kd ? i - kd : 0); j < std::min(n, i + kd + 1); ++j) {
      if (j != i) row += std::abs(a(i, j));
    }
    a.add(i, i, row + 1.0 + std::abs(u(rng)));
  }
  return a;
}

}  // namespace

TEST_CASE("symmetric access and band storage") {
  SymmetricBandMatrix a(6, 2);
  a.add(3, 1, 2.5);
  CHECK(a(3, 1) == 2.5);
  CHECK(a(1, 3) == 2.5);
  CHECK(a(5, 0) == 0.0);
  a.add(1, 3, 0.5);
  CHECK(a(3, 1) == 3.0);
}

TEST_CASE("solve recovers a known solution") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t kd : {0u, 1u, 5u, 12u}) {
    const std::size_t n = 200;
    SymmetricBandMatrix a = random_spd(n, kd, rng);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    const std::vector<double> b = a.multiply(x);
    a.factorize();
    CHECK(a.factorized());
    const std::vector<double> solved = a.solve(b);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(solved[i] - x[i]));
    CHECK(err < 1e-12);
    CHECK(a.pivot_ratio() >= 1.0);
  }
}

TEST_CASE("matches a dense Cholesky on a small tridiagonal system") {
  SymmetricBandMatrix a(4, 1);
  for (std::size_t i = 0; i < 4; ++i) a.add(i, i, 2.0);
  for (std::size_t i = 1; i < 4; ++i) a.add(i, i - 1, -1.0);
  a.factorize();
  const std::vector<double> b{1.0, 0.0, 0.0, 1.0};
  const auto x = a.solve(b);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("indefinite and singular matrices are rejected") {
  SymmetricBandMatrix indefinite(3, 1);
  indefinite.add(0, 0, 1.0);
  indefinite.add(1, 0, 2.0);
  indefinite.add(1, 1, 1.0);
  indefinite.add(2, 2, 1.0);
  CHECK_THROWS_AS(indefinite.factorize(), NumericalError);

  SymmetricBandMatrix singular(2, 1);
  singular.add(0, 0, 1.0);
  singular.add(1, 0, 1.0);
  singular.add(1, 1, 1.0);
  CHECK_THROWS_AS(singular.factorize(), NumericalError);

  SymmetricBandMatrix unfactored(2, 0);
  const std::vector<double> b{1.0, 1.0};
  CHECK_THROWS(unfactored.solve(b));
}
