#pragma once

// Classical SGN solver in the (h, m) variables, m = u - h^{-1} (h^3 u_x)_x / 3.
// Both evolution equations are pure conservation laws, so no implicit u_t
// appears; u is recovered from (h, m) by an elliptic solve each stage.

#include <cstddef>
#include <vector>

#include "sgn/core.hpp"
#include "sgn/structure.hpp"

namespace sgn {

struct HMState {
  Field h;
  Field m;
  double t = 0.0;

  /// Throws DryState when min(h) <= 0 and GridMismatch when h, m disagree.
  void validate() const;
};

HMState m_from_u(const PhysicalState& state, const DiffOperator& op);

/// Solves h u - (h^3 u_x)_x / 3 = h m. The operator is symmetric positive
/// definite for every discrete D with D^T = -D.
Field u_from_hm(const HMState& state, const DiffOperator& op);

struct HMRates {
  Field h_t;
  Field m_t;
};

HMRates classical_rhs(const HMState& state, const DiffOperator& op, const Params& params);

/// 0.25 dx / sqrt(g max h)
double default_reference_dt(const Field& h, const Params& params);

/// One classical RK4 step. Throws InstabilityDetected when any field leaves
/// [-1e6, 1e6] or turns non-finite.
HMState rk4_step(const HMState& state, double dt, const DiffOperator& op, const Params& params);

/// States at t0, every `stride` steps and at t_end; the last step is shortened
/// to land on t_end.
std::vector<HMState> rk4_run(const HMState& initial, double dt, double t_end,
                             const DiffOperator& op, const Params& params,
                             std::size_t stride = 1);

}  // namespace sgn
