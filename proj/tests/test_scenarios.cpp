#include <doctest.h>

#include <cmath>

#include "sgn/scenarios.hpp"

using namespace sgn;

TEST_SUITE("scenarios") {
  TEST_CASE("solitary waves certify across amplitudes") {
    const Params params{9.81};
    for (double a : {0.05, 0.1, 0.2, 0.4}) {
      CAPTURE(a);
      const Scenario s = solitary_wave(1.0, a, params);
      REQUIRE(s.certification.has_value());
      CHECK(s.certification->passed);
      CHECK(s.certification->mass_residual <= 1e-8);
      CHECK(s.certification->momentum_residual <= 1e-8);
      CHECK(s.certification->tail_deviation <= 1e-11);
    }
  }

  TEST_CASE("solitary constants") {
    const Params params{2.0};
    const auto c = solitary_constants(1.5, 0.3, params);
    CHECK(c.speed == doctest::Approx(std::sqrt(2.0 * 1.8)));
    CHECK(c.kappa == doctest::Approx(std::sqrt(0.9) / (2 * 1.5 * std::sqrt(1.8))));
  }

  TEST_CASE("short domains expose the solitary tails") {
    const Params params{9.81};
    const double L = solitary_tail_safe_length(1.0, 0.2, params);
    CHECK(L >= 40.0);
    CHECK(certify_solitary(1.0, 0.2, params, 512, L).passed);
    const auto short_domain = certify_solitary(1.0, 0.2, params, 512, 0.25 * L);
    CHECK(short_domain.tail_deviation > 1e-6);
  }

  TEST_CASE("crest sits at the centre and travels with the wave speed") {
    const Params params{9.81};
    const Scenario s = solitary_wave(1.0, 0.2, params);
    const Grid1D g(solitary_tail_safe_length(1.0, 0.2, params), 512);
    const PhysicalState st = s.initial_state(g);
    CHECK(st.h[256] == doctest::Approx(1.2).epsilon(1e-15));
    const double c = s.traveling->speed;
    const double T = 2.0 / c;
    const PhysicalState later = s.exact_solution(g, T);
    const Field moved = translate(st.h, 2.0);
    CHECK((later.h - moved).max_abs() <= 1e-8);
  }

  TEST_CASE("small amplitudes approach still water") {
    const Params params{9.81};
    for (double a : {1e-2, 1e-4, 1e-6}) {
      const Scenario s = solitary_wave(1.0, a, params);
      const Grid1D g(s.default_length, 64);
      const PhysicalState st = s.initial_state(g);
      CHECK((st.h - 1.0).max_abs() <= a * (1 + 1e-12));
      CHECK(st.u.max_abs() <= a * std::sqrt(params.g) * 1.01);
      CHECK(s.traveling->speed == doctest::Approx(std::sqrt(params.g * (1.0 + a))));
    }
  }

  TEST_CASE("degenerate parameters") {
    const Params params{9.81};
    CHECK_THROWS_AS(solitary_wave(1.0, 0.0, params), InvalidArgument);
    CHECK_THROWS_AS(solitary_wave(-1.0, 0.1, params), InvalidArgument);
    CHECK_THROWS_AS(still_water(0.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_hump(1.0, -1.0, 2.0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_hump(1.0, 0.1, 0.0), InvalidArgument);
    const Scenario flat = gaussian_hump(1.0, 0.0, 2.0);
    CHECK(flat.has_exact());
    CHECK_FALSE(gaussian_hump(1.0, 0.1, 2.0).has_exact());
    CHECK_THROWS_AS(gaussian_hump(1.0, 0.1, 2.0).exact_solution(Grid1D(40.0, 16), 1.0),
                    InvalidArgument);
  }

  TEST_CASE("uniform stream is exact and stationary") {
    const Scenario s = uniform_stream(2.0, 0.5);
    const Grid1D g(s.default_length, 16);
    const PhysicalState st = s.exact_solution(g, 3.0);
    CHECK(st.h.min() == 2.0);
    CHECK(st.u.max() == 0.5);
    CHECK(st.t == 3.0);
  }

  TEST_CASE("make_scenario applies defaults and rejects unknown parameters") {
    const Params params{9.81};
    const Scenario s = make_scenario("solitary", {}, params);
    CHECK(s.parameters.at("a") == 0.2);
    CHECK(make_scenario("gaussian", {{"a", 0.3}}, params).parameters.at("a") == 0.3);
    CHECK_THROWS_AS(make_scenario("solitary", {{"width", 1.0}}, params), InvalidArgument);
    CHECK_THROWS_AS(make_scenario("tsunami", {}, params), InvalidArgument);
  }

  TEST_CASE("initial data is deterministic") {
    const Params params{9.81};
    const Grid1D g(40.0, 100);
    const PhysicalState a = solitary_wave(1.0, 0.2, params).initial_state(g);
    const PhysicalState b = solitary_wave(1.0, 0.2, params).initial_state(g);
    CHECK((a.h - b.h).max_abs() == 0.0);
    CHECK((a.u - b.u).max_abs() == 0.0);
  }
}
