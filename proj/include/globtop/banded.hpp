#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace globtop {

/// Symmetric band matrix storing the lower triangle of the band, with an
/// in-place Cholesky factorization A = L L^T.
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix(std::size_t n, std::size_t half_bandwidth);

  std::size_t size() const { return n_; }
  std::size_t half_bandwidth() const { return kd_; }

  /// Element (i, j); zero outside the band. Symmetric access.
  double operator()(std::size_t i, std::size_t j) const;

  /// Add to (i, j) and, implicitly, (j, i). |i - j| must lie in the band.
  void add(std::size_t i, std::size_t j, double value);

  std::vector<double> multiply(std::span<const double> x) const;

  /// Factorize in place. Throws NumericalError when a pivot is not
  /// positive relative to its original diagonal entry.
  void factorize();
  bool factorized() const { return factorized_; }

  /// Solve A x = b after factorize().
  std::vector<double> solve(std::span<const double> b) const;

  /// (max L_ii / min L_ii)^2 after factorization; a cheap lower bound on
  /// the 2-norm condition number.
  double pivot_ratio() const { return pivot_ratio_; }

 private:
  double& at(std::size_t i, std::size_t j) { return band_[i * (kd_ + 1) + (kd_ - (i - j))]; }
  double at(std::size_t i, std::size_t j) const { return band_[i * (kd_ + 1) + (kd_ - (i - j))]; }

  std::size_t n_;
  std::size_t kd_;
  std::vector<double> band_;  // row i holds columns i-kd .. i
  bool factorized_ = false;
  double pivot_ratio_ = 0.0;
};

}  // namespace globtop
