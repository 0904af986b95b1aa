#include <doctest.h>

#include <cmath>
#include <vector>

#include "sgn/diagnostics.hpp"

using namespace sgn;

TEST_SUITE("diagnostics") {
  TEST_CASE("still water invariants") {
    const Grid1D g(40.0, 32);
    const PhysicalState st{Field(g, 1.0), Field(g, 0.0), 0.0};
    const Invariants inv = global_invariants(st, DiffOperator(DiffKind::fourier, g), Params{1.0});
    CHECK(inv.mass == doctest::Approx(40.0).epsilon(1e-15));
    CHECK(inv.energy == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(inv.momentum == 0.0);
    CHECK(inv.tangential == 0.0);
  }

  TEST_CASE("solitary wave mass") {
    const Params params{9.81};
    const double a = 0.2;
    const Scenario s = solitary_wave(1.0, a, params);
    const Grid1D g(solitary_tail_safe_length(1.0, a, params), 512);
    const Invariants inv =
        global_invariants(s.initial_state(g), DiffOperator(DiffKind::fourier, g), params);
    const double kappa = solitary_constants(1.0, a, params).kappa;
    CHECK(inv.mass == doctest::Approx(g.length() + 2.0 * a / kappa).epsilon(1e-13));
  }

  TEST_CASE("error norms of a sine") {
    const Grid1D g(12.0, 64);
    const double eps = 1e-3;
    const Field ds = Field::from_function(g, [&](double x) { return eps * std::sin(2 * M_PI * x / 12.0); });
    const PhysicalState exact{Field(g, 1.0), Field(g, 0.0), 0.0};
    const PhysicalState num{exact.h + ds, exact.u - ds, 0.0};
    const ErrorNorms e = error_norms(num, exact);
    CHECK(e.h_l2 == doctest::Approx(eps * std::sqrt(6.0)).epsilon(1e-13));
    CHECK(e.h_linf == doctest::Approx(eps).epsilon(1e-13));
    CHECK(e.u_l2 == doctest::Approx(e.h_l2));
    CHECK(e.u_linf == doctest::Approx(e.h_linf));
  }

  TEST_CASE("still water tensors") {
    const Grid1D g(10.0, 16);
    const Params params{2.0};
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift({Field(g, 1.5), Field(g, 0.0), 0.0}, op);
    ZState zt = ZState::zeros(g);
    zt[kPhi] = Field(g, -params.g * 1.5);
    const Tensors t = tensor_EFGI(z, zt, z_derivative(z, op), params);
    CHECK((t.E + 0.5 * params.g * 1.5 * 1.5).max_abs() <= 1e-14);
    CHECK(t.I.max_abs() <= 1e-14);
  }

  TEST_CASE("local laws vanish on the traveling solitary wave") {
    const Params params{9.81};
    const Scenario s = solitary_wave(1.0, 0.2, params);
    const Grid1D g(solitary_tail_safe_length(1.0, 0.2, params), 512);
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift(s.initial_state(g), op);
    const LocalLaws laws = local_law_residuals(z, traveling_z_t(z, *s.traveling, op), op, params);
    CHECK(laws.energy.max_abs() <= 1e-8);
    CHECK(laws.momentum.max_abs() <= 1e-8);
  }

  TEST_CASE("time derivatives need three snapshots") {
    const Grid1D g(10.0, 16);
    const DiffOperator op(DiffKind::fourier, g);
    const ZState z = lift({Field(g, 1.0), Field(g, 0.0), 0.0}, op);
    const std::vector<ZState> window{z, z};
    CHECK_THROWS_AS(conservation_residuals(window, 0, op, Params{}), InsufficientSnapshots);
    CHECK_THROWS_AS(window_time_derivative(window, 1, op, Params{}), InsufficientSnapshots);
  }

  TEST_CASE("windowed local laws on exact snapshots") {
    const Params params{9.81};
    const Scenario s = solitary_wave(1.0, 0.2, params);
    const Grid1D g(solitary_tail_safe_length(1.0, 0.2, params), 256);
    const DiffOperator op(DiffKind::fourier, g);
    const double dt = 1e-3;
    std::vector<ZState> window;
    for (int i = 0; i < 3; ++i) window.push_back(lift(s.exact_solution(g, i * dt), op));
    const LocalLaws laws = conservation_residuals(window, 1, op, params);
    // Second-order central difference in time.
    CHECK(laws.energy.max_abs() <= 1e-3);
    CHECK(laws.momentum.max_abs() <= 1e-3);
  }

  TEST_CASE("accumulator streams records") {
    const Grid1D g(40.0, 16);
    const Params params{1.0};
    DiagnosticsAccumulator acc(g, DiffKind::fourier, params);
    for (int i = 0; i < 4; ++i) acc.push({Field(g, 1.0), Field(g, 0.0), 0.1 * i}, i);
    const auto recs = acc.finish();
    REQUIRE(recs.size() == 4);
    for (const auto& r : recs) {
      CHECK(r.mass == doctest::Approx(40.0));
      CHECK(r.energy == doctest::Approx(20.0));
      CHECK(r.local_ms_law_max <= 1e-12);
    }
    CHECK(recs[3].newton_iters == 3);
    CHECK(recs[2].t == doctest::Approx(0.2));
  }

  TEST_CASE("convergence study on the solitary wave") {
    const Params params{9.81};
    const Scenario s = solitary_wave(1.0, 0.2, params);
    ConvergenceOptions opt;
    opt.resolutions = {{65, 0.04}, {129, 0.04 * 65 / 129.0}};
    opt.t_end = 0.2;
    const ConvergenceTable t = convergence_study(s, opt);
    REQUIRE(t.rows.size() == 2);
    CHECK(std::isnan(t.rows[0].observed_order));
    CHECK(t.rows[1].error_l2 < t.rows[0].error_l2);
    CHECK(t.rows[1].observed_order == doctest::Approx(2.0).epsilon(0.2));
    for (const auto& r : t.rows) CHECK(r.failure.empty());
  }

  TEST_CASE("least-squares slope") {
    CHECK(linear_fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
    CHECK(linear_fit_slope({0, 1, 2}, {1, 1, 1}) == doctest::Approx(0.0));
  }
}
