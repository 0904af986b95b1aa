#include "sgn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "sgn/errors.hpp"

namespace sgn::linalg {

CyclicBandedMatrix::CyclicBandedMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n), bw_(half_bandwidth), band_(n * (2 * half_bandwidth + 1), 0.0) {
  if (n == 0) throw InvalidArgument("cyclic banded matrix needs n > 0");
}

void CyclicBandedMatrix::add(std::size_t row, std::ptrdiff_t offset, double value) {
  const auto bw = static_cast<std::ptrdiff_t>(bw_);
  if (offset < -bw || offset > bw) throw InvalidArgument("offset outside the band");
  band_[row * (2 * bw_ + 1) + static_cast<std::size_t>(offset + bw)] += value;
}

double CyclicBandedMatrix::at(std::size_t row, std::size_t col) const {
  // On tiny grids several offsets can alias the same column.
  double sum = 0.0;
  const auto bw = static_cast<std::ptrdiff_t>(bw_);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  for (std::ptrdiff_t off = -bw; off <= bw; ++off) {
    const auto c = ((static_cast<std::ptrdiff_t>(row) + off) % n + n) % n;
    if (static_cast<std::size_t>(c) == col)
      sum += band_[row * (2 * bw_ + 1) + static_cast<std::size_t>(off + bw)];
  }
  return sum;
}

std::vector<double> CyclicBandedMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  const auto bw = static_cast<std::ptrdiff_t>(bw_);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::ptrdiff_t off = -bw; off <= bw; ++off) {
      const auto c = ((static_cast<std::ptrdiff_t>(i) + off) % n + n) % n;
      sum += band_[i * (2 * bw_ + 1) + static_cast<std::size_t>(off + bw)] *
             x[static_cast<std::size_t>(c)];
    }
    y[i] = sum;
  }
  return y;
}

Eigen::MatrixXd CyclicBandedMatrix::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                            static_cast<Eigen::Index>(n_));
  const auto bw = static_cast<std::ptrdiff_t>(bw_);
  const auto n = static_cast<std::ptrdiff_t>(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::ptrdiff_t off = -bw; off <= bw; ++off) {
      const auto c = ((static_cast<std::ptrdiff_t>(i) + off) % n + n) % n;
      a(static_cast<Eigen::Index>(i), c) += band_[i * (2 * bw_ + 1) + static_cast<std::size_t>(off + bw)];
    }
  return a;
}

CyclicBandedCholesky::CyclicBandedCholesky(const CyclicBandedMatrix& a)
    : n_(a.size()), bw_(a.half_bandwidth()) {
  if (bw_ == 0 || n_ < 2 * bw_ + 2) {
    dense_ = true;
    lead_ = n_;
    dense_llt_.compute(a.dense());
    if (dense_llt_.info() != Eigen::Success)
      throw SolverBreakdown("cyclic banded matrix is not positive definite", NAN);
    return;
  }
  lead_ = n_ - bw_;
  const std::size_t w = bw_ + 1;
  chol_.assign(lead_ * w, 0.0);
  // L(i, j) for i - bw <= j <= i lives at chol_[i * w + (i - j)].
  auto L = [&](std::size_t i, std::size_t j) -> double& { return chol_[i * w + (i - j)]; };
  for (std::size_t i = 0; i < lead_; ++i) {
    const std::size_t j0 = i >= bw_ ? i - bw_ : 0;
    for (std::size_t j = j0; j <= i; ++j) {
      double sum = a.at(i, j);
      for (std::size_t k = j0; k < j; ++k) sum -= L(i, k) * L(j, k);
      if (j == i) {
        if (!(sum > 0.0))
          throw SolverBreakdown("cyclic banded matrix is not positive definite (pivot " +
                                    std::to_string(i) + ")",
                                sum);
        L(i, i) = std::sqrt(sum);
      } else {
        L(i, j) = sum / L(j, j);
      }
    }
  }

  const auto lead = static_cast<Eigen::Index>(lead_);
  const auto bw = static_cast<Eigen::Index>(bw_);
  Eigen::MatrixXd upper_border = Eigen::MatrixXd::Zero(lead, bw);
  lower_border_ = Eigen::MatrixXd::Zero(bw, lead);
  Eigen::MatrixXd corner(bw, bw);
  for (Eigen::Index i = 0; i < lead; ++i)
    for (Eigen::Index j = 0; j < bw; ++j) {
      upper_border(i, j) = a.at(static_cast<std::size_t>(i), lead_ + static_cast<std::size_t>(j));
      lower_border_(j, i) = a.at(lead_ + static_cast<std::size_t>(j), static_cast<std::size_t>(i));
    }
  for (Eigen::Index i = 0; i < bw; ++i)
    for (Eigen::Index j = 0; j < bw; ++j)
      corner(i, j) = a.at(lead_ + static_cast<std::size_t>(i), lead_ + static_cast<std::size_t>(j));

  spill_ = upper_border;
  for (Eigen::Index j = 0; j < bw; ++j)
    band_solve(std::span<double>(spill_.col(j).data(), lead_));
  schur_.compute(corner - lower_border_ * spill_);
  if (schur_.info() != Eigen::Success)
    throw SolverBreakdown("Schur complement of cyclic banded matrix is not positive definite", NAN);
}

void CyclicBandedCholesky::band_solve(std::span<double> x) const {
  const std::size_t w = bw_ + 1;
  auto L = [&](std::size_t i, std::size_t j) { return chol_[i * w + (i - j)]; };
  for (std::size_t i = 0; i < lead_; ++i) {
    const std::size_t j0 = i >= bw_ ? i - bw_ : 0;
    double sum = x[i];
    for (std::size_t k = j0; k < i; ++k) sum -= L(i, k) * x[k];
    x[i] = sum / L(i, i);
  }
  for (std::size_t ii = lead_; ii-- > 0;) {
    const std::size_t k1 = std::min(lead_ - 1, ii + bw_);
    double sum = x[ii];
    for (std::size_t k = ii + 1; k <= k1; ++k) sum -= L(k, ii) * x[k];
    x[ii] = sum / L(ii, ii);
  }
}

std::vector<double> CyclicBandedCholesky::solve(std::span<const double> b) const {
  if (b.size() != n_) throw InvalidArgument("right-hand side has the wrong length");
  if (dense_) {
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n_));
    Eigen::VectorXd x = dense_llt_.solve(rhs);
    return {x.data(), x.data() + x.size()};
  }
  std::vector<double> x(b.begin(), b.end());
  std::span<double> head(x.data(), lead_);
  band_solve(head);
  Eigen::Map<Eigen::VectorXd> y(x.data(), static_cast<Eigen::Index>(lead_));
  Eigen::Map<Eigen::VectorXd> tail(x.data() + lead_, static_cast<Eigen::Index>(bw_));
  Eigen::VectorXd border = schur_.solve(tail - lower_border_ * y);
  y -= spill_ * border;
  tail = border;
  return x;
}

}  // namespace sgn::linalg
