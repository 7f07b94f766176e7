#include "globtop/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "globtop/error.hpp"

namespace globtop {

SymmetricBandMatrix::SymmetricBandMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n), kd_(std::min(half_bandwidth, n == 0 ? 0 : n - 1)), band_(n * (kd_ + 1), 0.0) {
  if (n == 0) {
    throw DomainError("band matrix must have at least one row");
  }
}

double SymmetricBandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > kd_) return 0.0;
  return at(i, j);
}

void SymmetricBandMatrix::add(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i >= n_ || i - j > kd_) {
    throw DomainError(fmt::format("entry ({}, {}) outside band of half-width {}", i, j, kd_));
  }
  at(i, j) += value;
}

std::vector<double> SymmetricBandMatrix::multiply(std::span<const double> x) const {
  if (factorized_) {
    throw DomainError("cannot multiply with a factorized band matrix");
  }
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kd_ ? i - kd_ : 0;
    for (std::size_t j = j0; j < i; ++j) {
      const double a = at(i, j);
      y[i] += a * x[j];
      y[j] += a * x[i];
    }
    y[i] += at(i, i) * x[i];
  }
  return y;
}

void SymmetricBandMatrix::factorize() {
  if (factorized_) return;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    max_diag = std::max(max_diag, std::abs(at(i, i)));
  }
  if (!(max_diag > 0.0) || !std::isfinite(max_diag)) {
    throw NumericalError("band matrix has no positive finite diagonal");
  }
  double l_max = 0.0;
  double l_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t k0 = j > kd_ ? j - kd_ : 0;
    const double original = at(j, j);
    double d = original;
    for (std::size_t k = k0; k < j; ++k) {
      d -= at(j, k) * at(j, k);
    }
    // Relative to the row's own diagonal, so mixed dof scalings are fine.
    if (!(d > 1e-13 * std::abs(original))) {
      throw NumericalError(fmt::format(
          "matrix not positive definite: pivot {} at row {} (diagonal {:.3e})", d, j, original));
    }
    const double ljj = std::sqrt(d);
    at(j, j) = ljj;
    l_max = std::max(l_max, ljj);
    l_min = std::min(l_min, ljj);
    const std::size_t i_end = std::min(n_, j + kd_ + 1);
    for (std::size_t i = j + 1; i < i_end; ++i) {
      const std::size_t m0 = i > kd_ ? i - kd_ : 0;
      double s = at(i, j);
      for (std::size_t k = std::max(m0, k0); k < j; ++k) {
        s -= at(i, k) * at(j, k);
      }
      at(i, j) = s / ljj;
    }
  }
  pivot_ratio_ = (l_max / l_min) * (l_max / l_min);
  factorized_ = true;
}

std::vector<double> SymmetricBandMatrix::solve(std::span<const double> b) const {
  if (!factorized_) {
    throw DomainError("band matrix must be factorized before solve");
  }
  if (b.size() != n_) {
    throw DomainError(fmt::format("right-hand side has {} entries, expected {}", b.size(), n_));
  }
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kd_ ? i - kd_ : 0;
    for (std::size_t j = j0; j < i; ++j) {
      x[i] -= at(i, j) * x[j];
    }
    x[i] /= at(i, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t i_end = std::min(n_, ii + kd_ + 1);
    for (std::size_t i = ii + 1; i < i_end; ++i) {
      x[ii] -= at(i, ii) * x[i];
    }
    x[ii] /= at(ii, ii);
  }
  return x;
}

}  // namespace globtop
