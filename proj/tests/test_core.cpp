#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sgn/core.hpp"

using namespace sgn;

namespace {

constexpr double kPi = std::numbers::pi;

Field wave(const Grid1D& g, int k) {
  const double L = g.length();
  return Field::from_function(g, [&](double x) { return std::sin(2 * kPi * k * x / L); });
}

double dwave_err(const Grid1D& g, DiffKind kind, int k) {
  const double L = g.length();
  const Field d = derivative(wave(g, k), DiffOperator(kind, g));
  const Field ex = Field::from_function(
      g, [&](double x) { return 2 * kPi * k / L * std::cos(2 * kPi * k * x / L); });
  return (d - ex).max_abs();
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("grid rejects degenerate sizes") {
    CHECK_THROWS_AS(Grid1D(10.0, 4), InvalidArgument);
    CHECK_THROWS_AS(Grid1D(-1.0, 64), InvalidArgument);
    CHECK_THROWS_AS(Grid1D(0.0, 64), InvalidArgument);
    const Grid1D g(10.0, 64);
    CHECK(g.dx() == doctest::Approx(10.0 / 64));
    CHECK(g.even());
    CHECK_FALSE(Grid1D(10.0, 65).even());
  }

  TEST_CASE("field arithmetic checks grids") {
    const Field a(Grid1D(1.0, 16), 1.0);
    const Field b(Grid1D(1.0, 32), 1.0);
    const Field c(Grid1D(2.0, 16), 1.0);
    CHECK_THROWS_AS(a + b, GridMismatch);
    CHECK_THROWS_AS(a * c, GridMismatch);
    const Field d = 2.0 * a - 0.5;
    CHECK(d.min() == 1.5);
    CHECK(d.mean() == 1.5);
  }

  TEST_CASE("fourier derivative is exact for resolved modes") {
    const Grid1D g(7.0, 64);
    for (int k : {1, 5, 31}) CHECK(dwave_err(g, DiffKind::fourier, k) <= 1e-11 * k);
  }

  TEST_CASE("finite differences converge at their design order") {
    for (auto [kind, order] : {std::pair{DiffKind::fd2, 2.0}, std::pair{DiffKind::fd4, 4.0}}) {
      const double e0 = dwave_err(Grid1D(1.0, 64), kind, 2);
      const double e1 = dwave_err(Grid1D(1.0, 128), kind, 2);
      CHECK(std::log2(e0 / e1) == doctest::Approx(order).epsilon(0.02));
    }
  }

  TEST_CASE("derivative of a constant vanishes") {
    const Grid1D g(3.0, 33);
    for (auto kind : {DiffKind::fd2, DiffKind::fd4, DiffKind::fourier})
      CHECK(derivative(Field(g, 2.5), DiffOperator(kind, g)).max_abs() <= 1e-13);
  }

  TEST_CASE("antiderivative split recovers mean and periodic part") {
    const auto split_error = [](std::size_t n, DiffKind kind) {
      const Grid1D g(5.0, n);
      const Field f = 0.7 + wave(g, 3);
      const auto split = antiderivative_split(f, kind);
      CHECK(split.mean == doctest::Approx(0.7).epsilon(1e-13));
      CHECK(std::abs(split.periodic.mean()) <= 1e-13);
      const double k = 2 * kPi * 3 / 5.0;
      const Field exact = Field::from_function(g, [k](double x) { return -std::cos(k * x) / k; });
      return (split.periodic - exact).max_abs();
    };
    CHECK(split_error(64, DiffKind::fourier) <= 1e-13);
    // The FD kinds integrate by the trapezoid rule.
    for (auto kind : {DiffKind::fd2, DiffKind::fd4})
      CHECK(std::log2(split_error(64, kind) / split_error(128, kind)) ==
            doctest::Approx(2.0).epsilon(0.02));
  }

  TEST_CASE("integrate is spectrally accurate for periodic data") {
    const Grid1D g(2.0, 16);
    const Field f = Field::from_function(g, [](double x) { return std::exp(std::sin(kPi * x)); });
    CHECK(integrate(f) == doctest::Approx(2.0 * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
  }

  TEST_CASE("resample and evaluate are exact for band-limited data") {
    const Grid1D coarse(4.0, 33), fine(4.0, 128);
    const Field f = wave(coarse, 4) + 0.25;
    const Field r = resample(f, fine);
    CHECK((r - (wave(fine, 4) + 0.25)).max_abs() <= 1e-13);
    const double x = 1.234;
    CHECK(evaluate_at(f, x) == doctest::Approx(std::sin(2 * kPi * 4 * x / 4.0) + 0.25));
    CHECK((resample(r, coarse) - f).max_abs() <= 1e-13);
  }

  TEST_CASE("translate shifts smooth fields") {
    const Grid1D g(6.0, 64);
    const Field f = wave(g, 2);
    const Field shifted = translate(f, 0.37);
    const Field ex =
        Field::from_function(g, [](double x) { return std::sin(2 * kPi * 2 * (x - 0.37) / 6.0); });
    CHECK((shifted - ex).max_abs() <= 1e-13);
    CHECK((translate(f, 6.0) - f).max_abs() <= 1e-13);
  }

  TEST_CASE("diff kind names round trip") {
    for (auto kind : {DiffKind::fd2, DiffKind::fd4, DiffKind::fourier})
      CHECK(diff_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(diff_kind_from_string("fd6"), InvalidArgument);
  }
}
