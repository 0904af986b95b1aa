#pragma once

// Conservation diagnostics: tensor densities E, F, G, I of the multi-symplectic
// form, their local laws on trajectories, global invariants of the classical
// variables, error norms and convergence tables.

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "sgn/core.hpp"
#include "sgn/integrators.hpp"
#include "sgn/scenarios.hpp"
#include "sgn/structure.hpp"

namespace sgn {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double tangential = 0.0;
  double E_int = 0.0;
  double I_int = 0.0;
  double local_ms_law_max = 0.0;
  int newton_iters = 0;
};

struct Tensors {
  Field E, F, G, I;
};

/// E = S + z_x.K.z / 2,  F = -z_t.K.z / 2,  G = S + z_t.M.z / 2,  I = -z_x.M.z / 2.
Tensors tensor_EFGI(const ZState& z, const ZState& z_t, const ZState& z_x, const Params& params);

struct LocalLaws {
  Field energy;    // d_t E + d_x F
  Field momentum;  // d_t I + d_x G
};

/// Both local laws for a state and its time derivative. x-derivatives of the
/// densities are expanded by the product rule, so only z and z_t are
/// differentiated (phi is not periodic).
LocalLaws local_law_residuals(const ZState& z, const ZState& z_t, const DiffOperator& op,
                              const Params& params);

/// Local laws at snapshot `index` of a window of at least three lifted
/// snapshots, using the three-point (possibly one-sided, possibly non-uniform)
/// time derivative. The phi gauge drift of re-lifted data is restored from the
/// (Sh) row at x_0. Throws InsufficientSnapshots for fewer than three.
LocalLaws conservation_residuals(const std::vector<ZState>& window, std::size_t index,
                                 const DiffOperator& op, const Params& params);

/// Time derivative of re-lifted snapshots at window[index], gauge-corrected.
ZState window_time_derivative(const std::vector<ZState>& window, std::size_t index,
                              const DiffOperator& op, const Params& params);

struct Invariants {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double tangential = 0.0;
};

/// Integrals of h, h u, h u^2/2 + h^3 u_x^2/6 + g h^2/2 and u - (h^3 u_x)_x / (3 h).
Invariants global_invariants(const PhysicalState& state, const DiffOperator& op,
                             const Params& params);

struct ErrorNorms {
  double h_l2 = 0.0, h_linf = 0.0;
  double u_l2 = 0.0, u_linf = 0.0;
};

/// Discrete norms of the differences; L2 = sqrt(dx sum e^2).
ErrorNorms error_norms(const PhysicalState& numeric, const PhysicalState& exact);

/// Streams snapshots into diagnostics records. Local-law maxima need the next
/// snapshot, so each record is completed one push late; finish() closes the
/// last one with a one-sided difference.
class DiagnosticsAccumulator {
 public:
  DiagnosticsAccumulator(const Grid1D& grid, DiffKind kind, Params params);

  void push(const PhysicalState& state, int newton_iters);
  std::vector<DiagnosticsRecord> finish();

 private:
  void close(std::size_t window_index);

  DiffOperator op_;
  Params params_;
  std::deque<ZState> window_;
  std::vector<DiagnosticsRecord> records_;
  std::size_t closed_ = 0;
};

struct ConvergenceRow {
  std::size_t n = 0;
  double dt = 0.0;
  double error_l2 = 0.0;
  double error_linf = 0.0;
  double observed_order = 0.0;  // NaN on the first row
  std::string failure;          // non-empty when the run failed
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

struct Resolution {
  std::size_t n;
  double dt;
};

struct ConvergenceOptions {
  Scheme scheme = Scheme::box;
  std::vector<Resolution> resolutions;  // coarse to fine
  double length = 0.0;                  // 0 selects the scenario default
  double t_end = 1.0;
  Params params;
  DiffKind diff = DiffKind::fourier;
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
};

/// Errors in h at t_end: against the exact solution when the scenario has one,
/// otherwise against the next finer run (Fourier-resampled), leaving the finest
/// row without an error. Orders are log(e_i / e_{i+1}) / log(dx_i / dx_{i+1}),
/// which is log2 of the error ratio when the resolution doubles.
ConvergenceTable convergence_study(const Scenario& scenario, const ConvergenceOptions& options);

/// Runs one configuration to t_end and returns the final physical state.
PhysicalState run_to(const Scenario& scenario, Scheme scheme, const Grid1D& grid, double dt,
                     double t_end, const Params& params, DiffKind diff, double newton_tol = 1e-11,
                     int newton_max_iter = 25);

/// Least-squares slope of y against x.
double linear_fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sgn
