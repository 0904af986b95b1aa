#pragma once

// Initial data with optional exact solutions. A scenario that carries an exact
// solution certifies it against the mass and momentum residuals on
// construction.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sgn/core.hpp"
#include "sgn/structure.hpp"

namespace sgn {

struct CertificationReport {
  std::size_t n = 0;
  double length = 0.0;
  double mass_residual = 0.0;      // sup-norm
  double momentum_residual = 0.0;  // sup-norm
  double tail_deviation = 0.0;     // max |h - h0| at the domain ends
  double threshold = 0.0;
  bool passed = false;
};

/// Exact traveling solution z(x - c t) plus the Bernoulli drift phi_t = ... + bernoulli.
struct TravelingWave {
  double speed = 0.0;
  double bernoulli = 0.0;
  double x0 = 0.0;  // crest position at t = 0
};

struct Scenario {
  std::string name;
  std::map<std::string, double> parameters;
  double default_length = 0.0;
  std::function<PhysicalState(const Grid1D&)> initial;
  std::function<PhysicalState(const Grid1D&, double)> exact;  // empty when unknown
  std::optional<TravelingWave> traveling;
  std::optional<CertificationReport> certification;

  PhysicalState initial_state(const Grid1D& grid) const { return initial(grid); }
  bool has_exact() const { return static_cast<bool>(exact); }
  /// Throws InvalidArgument when the scenario has no exact solution.
  PhysicalState exact_solution(const Grid1D& grid, double t) const;
};

Scenario still_water(double h0);
Scenario gaussian_hump(double h0, double a, double width);
Scenario uniform_stream(double h0, double velocity);

/// h = h0 + a sech^2(kappa (x - c t - x0)), u = c (1 - h0 / h),
/// c = sqrt(g (h0 + a)), kappa = sqrt(3 a) / (2 h0 sqrt(h0 + a)).
/// The crest starts at the middle of the default domain L = 40 h0 unless x0 is given.
/// Throws CertificationFailure when the residual oracle rejects the formula.
Scenario solitary_wave(double h0, double a, const Params& params,
                       std::optional<double> x0 = std::nullopt);

/// Solitary-wave profile constants.
struct SolitaryConstants {
  double speed;
  double kappa;
};
SolitaryConstants solitary_constants(double h0, double a, const Params& params);

/// Shortest domain on which the solitary tails fall below `tail` (and at least 40 h0).
double solitary_tail_safe_length(double h0, double a, const Params& params, double tail = 1e-12);

/// Runs the residual oracle for a solitary wave on an n-point grid of the given length.
CertificationReport certify_solitary(double h0, double a, const Params& params, std::size_t n,
                                     double length, double threshold = 1e-8);

/// z_t of a traveling state: -c z_x in every slot, plus `bernoulli` in phi.
ZState traveling_z_t(const ZState& z, const TravelingWave& wave, const DiffOperator& op);

/// Scenario by name with parameters (missing ones take defaults); used by the CLI.
Scenario make_scenario(const std::string& name, const std::map<std::string, double>& parameters,
                       const Params& params);

}  // namespace sgn
