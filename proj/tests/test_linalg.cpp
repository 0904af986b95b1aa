#include <doctest.h>

#include <random>
#include <vector>

#include "sgn/errors.hpp"
#include "sgn/linalg.hpp"

using namespace sgn::linalg;

namespace {

/// Diagonally dominant symmetric cyclic banded matrix.
CyclicBandedMatrix spd(std::size_t n, std::size_t bw, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CyclicBandedMatrix a(n, bw);
  for (std::size_t i = 0; i < n; ++i) a.add(i, 0, 2.0 * static_cast<double>(bw) + 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 1; o <= bw; ++o) {
      const double v = dist(rng);
      a.add(i, static_cast<std::ptrdiff_t>(o), v);
      a.add((i + o) % n, -static_cast<std::ptrdiff_t>(o), v);
    }
  return a;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("cyclic banded Cholesky matches a dense solve") {
    for (auto [n, bw] : {std::pair<std::size_t, std::size_t>{40, 1}, {57, 2}, {200, 2}, {5, 2}}) {
      CAPTURE(n);
      CAPTURE(bw);
      const auto a = spd(n, bw, static_cast<unsigned>(n));
      Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), -1.0, 2.0);
      const auto x = CyclicBandedCholesky(a).solve(std::vector<double>(b.data(), b.data() + n));
      const Eigen::VectorXd ref = a.dense().ldlt().solve(b);
      for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      const auto ax = a.multiply(x);
      for (std::size_t i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("corner entries wrap around") {
    CyclicBandedMatrix a(10, 2);
    a.add(0, -1, 3.0);
    a.add(9, 2, 4.0);
    CHECK(a.at(0, 9) == 3.0);
    CHECK(a.at(9, 1) == 4.0);
    CHECK(a.dense()(0, 9) == 3.0);
  }

  TEST_CASE("non positive definite input is rejected") {
    CyclicBandedMatrix a(30, 1);
    for (std::size_t i = 0; i < 30; ++i) {
      a.add(i, 0, 1.0);
      a.add(i, 1, 2.0);
      a.add((i + 1) % 30, -1, 2.0);
    }
    CHECK_THROWS_AS(CyclicBandedCholesky{a}, sgn::SolverBreakdown);
  }

  TEST_CASE("offsets beyond the bandwidth are rejected") {
    CyclicBandedMatrix a(10, 1);
    CHECK_THROWS(a.add(0, 2, 1.0));
  }
}
