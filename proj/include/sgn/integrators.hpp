#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "sgn/core.hpp"
#include "sgn/structure.hpp"

namespace sgn {

struct BoxSchemeConfig {
  double dt = 0.01;
  double newton_tol = 1e-11;  // on the max-norm of the nonlinear residual
  int newton_max_iter = 25;
  double damping = 1.0;       // initial step length, halved while the residual grows

  void validate() const;
};

struct StepReport {
  int newton_iters = 0;
  double residual = 0.0;
  std::vector<double> trace;  // residual max-norm per iterate, initial guess first
};

/// Two perturbation fields carried alongside a base trajectory. Perturbations
/// have no secular phi part.
struct TangentPair {
  ZState first;
  ZState second;
};

/// Preissmann box scheme on periodic cells [x_i, x_{i+1}]:
///   M (zbar^{n+1} - zbar^n)/dt + K (z~_{i+1} - z~_i)/dx = grad S(zhat),
/// bar = x-midpoint, tilde = t-weighted average, hat = both. theta = 1/2 is the
/// multi-symplectic box scheme; other weights exist only as negative controls.
class BoxScheme {
 public:
  BoxScheme(const Grid1D& grid, BoxSchemeConfig cfg, Params params, double theta = 0.5);
  ~BoxScheme();
  BoxScheme(BoxScheme&&) noexcept;
  BoxScheme& operator=(BoxScheme&&) noexcept;

  /// Advances one step. The initial guess is z (first call) or the linear
  /// extrapolation 2 z^n - z^{n-1} from the previous call.
  ZState step(const ZState& z, StepReport* report = nullptr);
  ZState step_from_guess(const ZState& z, const ZState& guess, StepReport* report = nullptr);

  /// Box residual per cell, rows in state-component order.
  std::array<Field, kZ> residual(const ZState& z_n, const ZState& z_np1) const;

  /// Exact linearization of the step map about a converged step.
  TangentPair tangent(const ZState& z_n, const ZState& z_np1, const TangentPair& pair_n) const;
  ZState tangent(const ZState& z_n, const ZState& z_np1, const ZState& dz_n) const;

  void forget_history();
  const BoxSchemeConfig& config() const noexcept { return cfg_; }
  void set_dt(double dt);

 private:
  struct Impl;
  BoxSchemeConfig cfg_;
  Params params_;
  double theta_;
  std::unique_ptr<Impl> impl_;
};

ZState box_step(const ZState& z, const BoxSchemeConfig& cfg, const Params& params,
                StepReport* report = nullptr);

/// The theta = 1 (implicit Euler in time) box variant. A forward-Euler box
/// variant cannot be solved because the algebraic rows carry no M or K terms.
ZState euler_box_step(const ZState& z, const BoxSchemeConfig& cfg, const Params& params,
                      StepReport* report = nullptr);

TangentPair tangent_box_step(const ZState& z_n, const ZState& z_np1, const TangentPair& pair,
                             const BoxSchemeConfig& cfg, const Params& params);

/// Per box: (omega^{n+1} - omega^n)/dt + (kappa_{i+1} - kappa_i)/dx with
/// omega = <M dzbar1, dzbar2> and kappa = <K dz~1, dz~2>.
Field discrete_twoform_residual(const ZState& z_n, const ZState& z_np1,
                                const TangentPair& pair_n, const TangentPair& pair_np1,
                                const Grid1D& grid, double dt);

/// Implicit midpoint in time with Fourier differentiation in space:
///   M (z^{n+1} - z^n)/dt + K D z^{n+1/2} = grad S(z^{n+1/2}).
/// Newton uses a dense LU of the Jacobian, refreshed when convergence slows.
class SpectralMidpoint {
 public:
  SpectralMidpoint(const Grid1D& grid, BoxSchemeConfig cfg, Params params);
  ~SpectralMidpoint();
  SpectralMidpoint(SpectralMidpoint&&) noexcept;
  SpectralMidpoint& operator=(SpectralMidpoint&&) noexcept;

  ZState step(const ZState& z, StepReport* report = nullptr);
  std::array<Field, kZ> residual(const ZState& z_n, const ZState& z_np1) const;
  void forget_history();
  void set_dt(double dt);

 private:
  struct Impl;
  BoxSchemeConfig cfg_;
  Params params_;
  std::unique_ptr<Impl> impl_;
};

ZState spectral_midpoint_step(const ZState& z, const BoxSchemeConfig& cfg, const Params& params,
                              StepReport* report = nullptr);

enum class Scheme { box, spectral_midpoint, reference_rk4 };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

struct RunOptions {
  Scheme scheme = Scheme::box;
  BoxSchemeConfig cfg;  // dt is used by every scheme
  Params params;
  double t_end = 1.0;
  DiffKind diff = DiffKind::fourier;  // reference solver operator and re-lifting
  std::size_t snapshot_stride = 1;
};

struct Snapshot {
  long step;
  double t;
  const PhysicalState& state;
  const ZState* z;  // null for the reference solver
  int newton_iters;
  bool last;
};

using SnapshotCallback = std::function<void(const Snapshot&)>;

struct RunSummary {
  PhysicalState final_state;
  long steps = 0;
  long newton_iters = 0;
};

/// Advances `initial` to t_end, calling back at step 0, every stride and at
/// the final step. Step failures are rethrown as RunFailure.
RunSummary run_simulation(const ZState& initial, const RunOptions& options,
                          const SnapshotCallback& callback = {});

}  // namespace sgn
