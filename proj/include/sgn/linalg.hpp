#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sgn::linalg {

/// Square matrix whose entries (i, j) vanish unless the cyclic distance between
/// i and j is at most the half bandwidth. Typical of periodic FD operators.
class CyclicBandedMatrix {
 public:
  CyclicBandedMatrix(std::size_t n, std::size_t half_bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t half_bandwidth() const noexcept { return bw_; }

  /// Adds `value` at (row, (row + offset) mod n); |offset| <= half bandwidth.
  void add(std::size_t row, std::ptrdiff_t offset, double value);
  double at(std::size_t row, std::size_t col) const;

  std::vector<double> multiply(std::span<const double> x) const;
  Eigen::MatrixXd dense() const;

 private:
  std::size_t n_, bw_;
  std::vector<double> band_;  // row-major, 2 bw + 1 diagonals per row
};

/// Direct solver for symmetric positive definite cyclic banded systems.
///
/// The last `bw` unknowns form a border; the leading block is then an ordinary
/// banded SPD matrix factored by band Cholesky, and the border is closed with a
/// small dense Schur complement. Cost is O(n bw^2). Grids too small for a
/// separate border fall back to a dense Cholesky.
class CyclicBandedCholesky {
 public:
  explicit CyclicBandedCholesky(const CyclicBandedMatrix& a);

  std::vector<double> solve(std::span<const double> b) const;

 private:
  void band_solve(std::span<double> x) const;  // in place, leading block only

  std::size_t n_, bw_, lead_;
  bool dense_ = false;
  std::vector<double> chol_;             // leading block factor, lead_ x (bw+1)
  Eigen::MatrixXd lower_border_;         // A21, bw x lead
  Eigen::MatrixXd spill_;                // A11^{-1} A12, lead x bw
  Eigen::LLT<Eigen::MatrixXd> schur_;    // factor of A22 - A21 A11^{-1} A12
  Eigen::LLT<Eigen::MatrixXd> dense_llt_;
};

}  // namespace sgn::linalg
