#include <doctest.h>

#include <cmath>
#include <random>

#include "sgn/scenarios.hpp"
#include "sgn/structure.hpp"

using namespace sgn;

namespace {

ZPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ZPoint z{};
  for (double& v : z) v = d(rng);
  z[kH] = 1.0 + 0.5 * z[kH];
  return z;
}

PhysicalState smooth_state(const Grid1D& g) {
  const double L = g.length();
  return {Field::from_function(g, [&](double x) { return 1.0 + 0.2 * std::cos(2 * M_PI * x / L); }),
          Field::from_function(g, [&](double x) { return 0.3 + 0.1 * std::sin(4 * M_PI * x / L); }),
          0.0};
}

}  // namespace

TEST_SUITE("structure") {
  TEST_CASE("M and K are skew with ranks 2 and 4") {
    for (const SkewForm* f : {&build_M(), &build_K()}) {
      const ZMatrix a = f->dense();
      for (std::size_t i = 0; i < kZ; ++i)
        for (std::size_t j = 0; j < kZ; ++j) CHECK(a[i][j] == -a[j][i]);
    }
    CHECK(build_M().rank() == 2);
    CHECK(build_K().rank() == 4);
    CHECK(build_M().at(kH, kPhi) == 1.0);
    CHECK(build_K().at(kPhi, kQ) == -1.0);
  }

  TEST_CASE("gradient and Hessian agree with central differences") {
    std::mt19937_64 rng(11);
    const Params params{9.81};
    const double eps = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
      const ZPoint z = random_point(rng);
      const ZPoint grad = grad_S(z, params);
      const ZMatrix hess = hess_S(z, params);
      for (std::size_t k = 0; k < kZ; ++k) {
        ZPoint zp = z, zm = z;
        zp[k] += eps;
        zm[k] -= eps;
        const double fd = (hamiltonian_S(zp, params) - hamiltonian_S(zm, params)) / (2 * eps);
        CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-7));
        const ZPoint gp = grad_S(zp, params), gm = grad_S(zm, params);
        for (std::size_t j = 0; j < kZ; ++j) {
          CHECK(hess[j][k] == doctest::Approx((gp[j] - gm[j]) / (2 * eps)).epsilon(1e-7));
          CHECK(hess[j][k] == hess[k][j]);
        }
      }
    }
  }

  TEST_CASE("lift satisfies the algebraic and definition rows exactly") {
    const Grid1D g(10.0, 128);
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift(smooth_state(g), op);
    const auto r = ms_residual(z, ZState::zeros(g), op, Params{});
    CHECK(r[kU].max_abs() <= 1e-13);
    CHECK(r[kV].max_abs() <= 1e-13);
    CHECK(r[kS].max_abs() <= 1e-13);
    // (Sq), (Sr) hold up to the discrete derivative of a product.
    CHECK(r[kQ].max_abs() <= 1e-10);
    CHECK(r[kR].max_abs() <= 1e-10);
    const PhysicalState back = project(z);
    CHECK((back.h - smooth_state(g).h).max_abs() == 0.0);
  }

  TEST_CASE("phi keeps its secular slope through the lift") {
    const Grid1D g(10.0, 64);
    const DiffOperator op(DiffKind::fourier, g);
    const PhysicalState st = smooth_state(g);
    const ZState z = lift(st, op);
    CHECK(z.phi_slope == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(z[kPhi][0] == 0.0);
    const ZState zx = z_derivative(z, op);
    const Field expect = st.u + (1.0 / 3.0) * z[kS] * z[kV];
    CHECK((zx[kPhi] - expect).max_abs() <= 1e-12);
  }

  TEST_CASE("still water is an exact solution with a Bernoulli phi drift") {
    const Grid1D g(40.0, 64);
    const Params params{1.0};
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift({Field(g, 2.0), Field(g, 0.0), 0.0}, op);
    ZState zt = ZState::zeros(g);
    zt[kPhi] = Field(g, -params.g * 2.0);
    for (const Field& row : ms_residual(z, zt, op, params)) CHECK(row.max_abs() <= 1e-14);
  }

  TEST_CASE("the lifted solitary wave is a traveling solution") {
    const Params params{9.81};
    const Scenario sc = solitary_wave(1.0, 0.2, params);
    const Grid1D g(solitary_tail_safe_length(1.0, 0.2, params), 512);
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift(sc.initial_state(g), op);
    const ZState zt = traveling_z_t(z, *sc.traveling, op);
    for (const Field& row : ms_residual(z, zt, op, params)) CHECK(row.max_abs() <= 1e-9);
  }

  TEST_CASE("Euler-Lagrange residuals are combinations of multi-symplectic rows") {
    const Grid1D g(10.0, 64);
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift(smooth_state(g), op);
    // Arbitrary h_t, u_t, phi_t, differentiated through the lift: the
    // correspondence is algebraic and must not need a solution.
    const Field h_t = Field::from_function(g, [](double x) { return std::sin(0.6 * x); });
    const Field u_t = Field::from_function(g, [](double x) { return std::cos(1.2 * x) - 0.3; });
    const Field& h = z[kH];
    ZState zt = ZState::zeros(g);
    zt[kH] = h_t;
    zt[kU] = u_t;
    zt[kPhi] = Field::from_function(g, [](double x) { return 0.5 + std::sin(0.6 * x); });
    zt[kS] = derivative(h_t, op);
    zt[kV] = -(h_t * derivative(z[kU], op) + h * derivative(u_t, op));
    zt[kP] = h_t * z[kV] + h * zt[kV];
    zt[kQ] = h_t * z[kU] + h * u_t;
    zt[kR] = zt[kQ] * z[kV] + z[kQ] * zt[kV];
    const auto ms = ms_residual(z, zt, op, Params{});
    const auto el = el_residuals(relaxed_from_lift(z, zt, op), Params{});
    const auto mapped = el_from_ms(ms, z);
    for (std::size_t k = 0; k < kElRows; ++k) CHECK((el[k] - mapped[k]).max_abs() <= 1e-10);
  }

  TEST_CASE("classical residuals reject a perturbed solitary wave") {
    const Params params{9.81};
    const Scenario sc = solitary_wave(1.0, 0.2, params);
    const Grid1D g(solitary_tail_safe_length(1.0, 0.2, params), 256);
    const DiffOperator op(DiffKind::fourier, g);
    PhysicalState st = sc.initial_state(g);
    const double c = sc.traveling->speed;
    Field h_t = -c * derivative(st.h, op);
    CHECK(residual_mass(st, h_t, op).max_abs() <= 1e-9);
    st.u *= 1.01;
    CHECK(residual_mass(st, h_t, op).max_abs() >= 1e-4);
  }

  TEST_CASE("dry states are rejected") {
    const Grid1D g(1.0, 16);
    PhysicalState st{Field(g, 1.0), Field(g, 0.0), 0.0};
    st.h[3] = 0.0;
    CHECK_THROWS_AS(lift(st, DiffOperator(DiffKind::fourier, g)), DryState);
  }
}
