#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "sgn/diagnostics.hpp"
#include "sgn/integrators.hpp"
#include "sgn/scenarios.hpp"

using namespace sgn;

namespace {

ZState solitary_z(const Grid1D& g, const Params& params, double a = 0.2) {
  const Scenario s = solitary_wave(1.0, a, params);
  return lift(s.initial_state(g), DiffOperator(DiffKind::fourier, g));
}

ZState noise(const Grid1D& g, unsigned seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  ZState z = ZState::zeros(g);
  for (std::size_t k = 0; k < kZ; ++k)
    for (std::size_t i = 0; i < g.size(); ++i) z[k][i] = d(rng);
  return z;
}

ZState axpy(const ZState& x, double a, const ZState& y) {
  ZState r = x;
  for (std::size_t k = 0; k < kZ; ++k) r[k] += a * y[k];
  return r;
}

double max_diff(const ZState& a, const ZState& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < kZ; ++k) m = std::max(m, (a[k] - b[k]).max_abs());
  return m;
}

}  // namespace

TEST_SUITE("integrators") {
  TEST_CASE("still water steps exactly with a uniform phi drift") {
    const Grid1D g(40.0, 33);
    const Params params{9.81};
    const ZState z = lift({Field(g, 1.5), Field(g, 0.0), 0.0}, DiffOperator(DiffKind::fourier, g));
    BoxSchemeConfig cfg;
    cfg.dt = 0.05;
    for (bool midpoint : {false, true}) {
      CAPTURE(midpoint);
      const ZState next = midpoint ? spectral_midpoint_step(z, cfg, params) : box_step(z, cfg, params);
      for (std::size_t k = 0; k < kZ; ++k) {
        if (k == kPhi) continue;
        CHECK((next[k] - z[k]).max_abs() <= 1e-13);
      }
      CHECK((next[kPhi] - (z[kPhi] - params.g * 1.5 * cfg.dt)).max_abs() <= 1e-12);
      CHECK(next.t == doctest::Approx(cfg.dt));
    }
  }

  TEST_CASE("even grids report the checkerboard null mode") {
    const Grid1D g(40.0, 64);
    BoxSchemeConfig cfg;
    cfg.dt = 0.02;
    try {
      box_step(solitary_z(g, Params{}), cfg, Params{});
      FAIL("expected SingularJacobian");
    } catch (const SingularJacobian& e) {
      CHECK(std::string(e.what()).find("odd n") != std::string::npos);
    }
  }

  TEST_CASE("run_simulation wraps step failures with their position") {
    const Grid1D g(40.0, 64);
    RunOptions opt;
    opt.cfg.dt = 0.02;
    opt.t_end = 0.1;
    try {
      run_simulation(solitary_z(g, opt.params), opt);
      FAIL("expected RunFailure");
    } catch (const RunFailure& e) {
      CHECK(e.cause == "SingularJacobian");
      CHECK(e.step_index == 1);
    }
  }

  TEST_CASE("invalid step configurations are rejected") {
    BoxSchemeConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg.dt = 0.1;
    cfg.newton_max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  }

  TEST_CASE("Newton failure carries the residual trace") {
    const Grid1D g(40.0, 65);
    BoxSchemeConfig cfg;
    cfg.dt = 0.05;
    cfg.newton_max_iter = 1;
    cfg.newton_tol = 1e-15;
    try {
      box_step(solitary_z(g, Params{}), cfg, Params{});
      FAIL("expected NewtonDivergence");
    } catch (const NewtonDivergence& e) {
      CHECK(e.residual_trace.size() >= 2);
      CHECK(e.residual_trace.back() < e.residual_trace.front());
    }
  }

  TEST_CASE("box scheme conserves mass to round-off") {
    const Params params{9.81};
    const Grid1D g(40.0, 129);
    ZState z = solitary_z(g, params);
    BoxSchemeConfig cfg;
    cfg.dt = 0.02;
    BoxScheme scheme(g, cfg, params);
    const double m0 = integrate(z[kH]);
    for (int n = 0; n < 25; ++n) {
      StepReport rep;
      z = scheme.step(z, &rep);
      CHECK(rep.residual <= cfg.newton_tol);
    }
    CHECK(std::abs(integrate(z[kH]) - m0) <= 1e-11 * m0);
    CHECK(z.t == doctest::Approx(0.5));
  }

  TEST_CASE("tangent map is the derivative of the step map") {
    const Params params{9.81};
    const Grid1D g(40.0, 65);
    const ZState z = solitary_z(g, params);
    BoxSchemeConfig cfg;
    cfg.dt = 0.04;
    cfg.newton_tol = 1e-13;
    const BoxScheme scheme(g, cfg, params);
    const ZState next = box_step(z, cfg, params);
    const ZState dz = noise(g, 3, 1.0);
    const ZState lin = scheme.tangent(z, next, dz);
    const double eps = 1e-6;
    const ZState pert = box_step(axpy(z, eps, dz), cfg, params);
    ZState fd = ZState::zeros(g);
    for (std::size_t k = 0; k < kZ; ++k) fd[k] = (pert[k] - next[k]) * (1.0 / eps);
    CHECK(max_diff(fd, lin) <= 1e-4 * std::max(1.0, max_diff(lin, ZState::zeros(g))));
  }

  TEST_CASE("box scheme preserves the discrete two-form, the theta = 1 variant does not") {
    const Params params{9.81};
    const Grid1D g(40.0, 65);
    BoxSchemeConfig cfg;
    cfg.dt = 0.04;
    double worst[2] = {0.0, 0.0};
    for (int variant = 0; variant < 2; ++variant) {
      ZState z = solitary_z(g, params);
      BoxScheme scheme(g, cfg, params, variant == 0 ? 0.5 : 1.0);
      TangentPair pair{noise(g, 1, 1.0), noise(g, 2, 1.0)};
      for (int n = 0; n < 5; ++n) {
        const ZState next = scheme.step(z);
        const TangentPair adv = scheme.tangent(z, next, pair);
        worst[variant] = std::max(
            worst[variant], discrete_twoform_residual(z, next, pair, adv, g, cfg.dt).max_abs());
        pair = adv;
        z = next;
      }
    }
    CHECK(worst[0] <= 1e-8);
    CHECK(worst[1] >= 1e3 * worst[0]);
  }

  TEST_CASE("box scheme is second order on the solitary wave") {
    const Params params{9.81};
    const Scenario s = solitary_wave(1.0, 0.2, params);
    double err[2];
    const std::size_t ns[2] = {65, 129};
    for (int i = 0; i < 2; ++i) {
      const Grid1D g(s.default_length, ns[i]);
      const double dt = 0.04 * 65.0 / static_cast<double>(ns[i]);
      const PhysicalState num = run_to(s, Scheme::box, g, dt, 0.4, params, DiffKind::fourier);
      err[i] = error_norms(num, s.exact_solution(g, 0.4)).h_l2;
    }
    const double order = std::log(err[0] / err[1]) / std::log(129.0 / 65.0);
    CHECK(order == doctest::Approx(2.0).epsilon(0.15));
  }

  TEST_CASE("spectral midpoint solves its step equations and conserves mass") {
    const Params params{9.81};
    const Grid1D g(40.0, 64);
    ZState z = solitary_z(g, params);
    BoxSchemeConfig cfg;
    cfg.dt = 0.05;
    SpectralMidpoint scheme(g, cfg, params);
    const double m0 = integrate(z[kH]);
    for (int n = 0; n < 4; ++n) {
      const ZState next = scheme.step(z);
      double r = 0.0;
      for (const Field& row : scheme.residual(z, next)) r = std::max(r, row.max_abs());
      CHECK(r <= 1e-9);
      z = next;
    }
    CHECK(std::abs(integrate(z[kH]) - m0) <= 1e-11 * m0);
  }

  TEST_CASE("run_simulation reports first and last snapshots") {
    const Params params{9.81};
    const Grid1D g(40.0, 65);
    RunOptions opt;
    opt.cfg.dt = 0.03;
    opt.t_end = 0.1;
    opt.snapshot_stride = 2;
    std::vector<long> steps;
    bool last_seen = false;
    const RunSummary sum = run_simulation(solitary_z(g, params), opt, [&](const Snapshot& s) {
      steps.push_back(s.step);
      if (s.last) {
        last_seen = true;
        CHECK(s.t == doctest::Approx(0.1).epsilon(1e-12));
      }
    });
    CHECK(sum.steps == 4);
    CHECK(steps.front() == 0);
    CHECK(steps.back() == 4);
    CHECK(last_seen);
    CHECK(sum.final_state.t == doctest::Approx(0.1).epsilon(1e-12));
  }

  TEST_CASE("scheme names round trip") {
    for (Scheme s : {Scheme::box, Scheme::spectral_midpoint, Scheme::reference_rk4})
      CHECK(scheme_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(scheme_from_string("leapfrog"), InvalidArgument);
  }
}
