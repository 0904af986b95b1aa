#include "sgn/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "sgn/errors.hpp"

namespace sgn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dot(const ZPoint& a, const ZPoint& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < kZ; ++k) s += a[k] * b[k];
  return s;
}

/// Derivative weights at t of the quadratic through (t0, t1, t2).
std::array<double, 3> lagrange_derivative(double t0, double t1, double t2, double t) {
  return {(2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2)),
          (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2)),
          (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1))};
}

}  // namespace

Tensors tensor_EFGI(const ZState& z, const ZState& z_t, const ZState& z_x, const Params& params) {
  if (!(z.grid() == z_t.grid()) || !(z.grid() == z_x.grid()))
    throw GridMismatch("tensor densities: inconsistent grids");
  const SkewForm M = build_M(), K = build_K();
  const Grid1D& grid = z.grid();
  Tensors out{Field(grid), Field(grid), Field(grid), Field(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ZPoint zp = z.at(i), zt = z_t.at(i), zx = z_x.at(i);
    const double s = hamiltonian_S(zp, params);
    out.E[i] = s + 0.5 * K.bilinear(zx, zp);
    out.F[i] = -0.5 * K.bilinear(zt, zp);
    out.G[i] = s + 0.5 * M.bilinear(zt, zp);
    out.I[i] = -0.5 * M.bilinear(zx, zp);
  }
  return out;
}

LocalLaws local_law_residuals(const ZState& z, const ZState& z_t, const DiffOperator& op,
                              const Params& params) {
  if (!(z.grid() == z_t.grid()) || !(z.grid() == op.grid()))
    throw GridMismatch("local laws: inconsistent grids");
  const SkewForm M = build_M(), K = build_K();
  const ZState z_x = z_derivative(z, op);
  const ZState z_tx = z_derivative(z_t, op);
  const Grid1D& grid = z.grid();
  LocalLaws out{Field(grid), Field(grid)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ZPoint zp = z.at(i), zt = z_t.at(i), zx = z_x.at(i), ztx = z_tx.at(i);
    const ZPoint gs = grad_S(zp, params);
    const double dt_E = dot(gs, zt) + 0.5 * (K.bilinear(ztx, zp) + K.bilinear(zx, zt));
    const double dx_F = -0.5 * (K.bilinear(ztx, zp) + K.bilinear(zt, zx));
    const double dt_I = -0.5 * (M.bilinear(ztx, zp) + M.bilinear(zx, zt));
    const double dx_G = dot(gs, zx) + 0.5 * (M.bilinear(ztx, zp) + M.bilinear(zt, zx));
    out.energy[i] = dt_E + dx_F;
    out.momentum[i] = dt_I + dx_G;
  }
  return out;
}

ZState window_time_derivative(const std::vector<ZState>& window, std::size_t index,
                              const DiffOperator& op, const Params& params) {
  if (window.size() < 3)
    throw InsufficientSnapshots("time differencing needs at least 3 snapshots, got " +
                                std::to_string(window.size()));
  if (index >= window.size()) throw InvalidArgument("snapshot index out of range");
  const std::size_t first = index == 0 ? 0 : std::min(index - 1, window.size() - 3);
  const ZState& a = window[first];
  const ZState& b = window[first + 1];
  const ZState& c = window[first + 2];
  if (!(a.t < b.t && b.t < c.t))
    throw InvalidArgument("snapshot times must be strictly increasing");
  const auto w = lagrange_derivative(a.t, b.t, c.t, window[index].t);
  ZState z_t = ZState::zeros(a.grid());
  z_t.t = window[index].t;
  for (std::size_t k = 0; k < kZ; ++k) z_t[k] = w[0] * a[k] + w[1] * b[k] + w[2] * c[k];
  z_t.phi_slope = w[0] * a.phi_slope + w[1] * b.phi_slope + w[2] * c.phi_slope;
  // Re-lifting pins phi(x_0) = 0 at every time; the (Sh) row restores phi_t(x_0).
  const double gauge = ms_residual(window[index], z_t, op, params)[kH][0];
  z_t[kPhi] -= gauge;
  return z_t;
}

LocalLaws conservation_residuals(const std::vector<ZState>& window, std::size_t index,
                                 const DiffOperator& op, const Params& params) {
  const ZState z_t = window_time_derivative(window, index, op, params);
  return local_law_residuals(window[index], z_t, op, params);
}

Invariants global_invariants(const PhysicalState& state, const DiffOperator& op,
                             const Params& params) {
  state.validate();
  const Field& h = state.h;
  const Field& u = state.u;
  const Field u_x = derivative(u, op);
  const Field h3 = h * h * h;
  Invariants inv;
  inv.mass = integrate(h);
  inv.momentum = integrate(h * u);
  inv.energy = integrate(0.5 * h * u * u + (1.0 / 6.0) * h3 * u_x * u_x + 0.5 * params.g * h * h);
  inv.tangential = integrate(u - (1.0 / 3.0) * derivative(h3 * u_x, op) / h);
  return inv;
}

ErrorNorms error_norms(const PhysicalState& numeric, const PhysicalState& exact) {
  require_same_grid(numeric.h, exact.h);
  require_same_grid(numeric.u, exact.u);
  const double dx = numeric.h.grid().dx();
  auto norms = [dx](const Field& a, const Field& b, double& l2, double& linf) {
    double s = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double e = a[i] - b[i];
      s += e * e;
      m = std::max(m, std::abs(e));
    }
    l2 = std::sqrt(dx * s);
    linf = m;
  };
  ErrorNorms out;
  norms(numeric.h, exact.h, out.h_l2, out.h_linf);
  norms(numeric.u, exact.u, out.u_l2, out.u_linf);
  return out;
}

DiagnosticsAccumulator::DiagnosticsAccumulator(const Grid1D& grid, DiffKind kind, Params params)
    : op_(kind, grid), params_(params) {}

void DiagnosticsAccumulator::push(const PhysicalState& state, int newton_iters) {
  ZState z = lift(state, op_);
  z.t = state.t;
  const Invariants inv = global_invariants(state, op_, params_);
  const ZState z_x = z_derivative(z, op_);
  const Tensors tens = tensor_EFGI(z, ZState::zeros(z.grid()), z_x, params_);
  records_.push_back({state.t, inv.mass, inv.momentum, inv.energy, inv.tangential,
                      integrate(tens.E), integrate(tens.I), kNaN, newton_iters});
  window_.push_back(std::move(z));
  if (window_.size() > 3) window_.pop_front();
  if (window_.size() == 3) {
    if (closed_ == 0) close(0);
    close(1);
  }
}

void DiagnosticsAccumulator::close(std::size_t window_index) {
  const std::vector<ZState> window(window_.begin(), window_.end());
  const LocalLaws laws = conservation_residuals(window, window_index, op_, params_);
  const std::size_t record = records_.size() - window_.size() + window_index;
  records_[record].local_ms_law_max = std::max(laws.energy.max_abs(), laws.momentum.max_abs());
  closed_ = record + 1;
}

std::vector<DiagnosticsRecord> DiagnosticsAccumulator::finish() {
  if (window_.size() == 3 && closed_ < records_.size()) close(2);
  window_.clear();
  return std::move(records_);
}

PhysicalState run_to(const Scenario& scenario, Scheme scheme, const Grid1D& grid, double dt,
                     double t_end, const Params& params, DiffKind diff, double newton_tol,
                     int newton_max_iter) {
  const PhysicalState init = scenario.initial_state(grid);
  RunOptions opts;
  opts.scheme = scheme;
  opts.cfg.dt = dt;
  opts.cfg.newton_tol = newton_tol;
  opts.cfg.newton_max_iter = newton_max_iter;
  opts.params = params;
  opts.t_end = t_end;
  opts.diff = diff;
  ZState z0 = lift(init, DiffOperator(diff, grid));
  return run_simulation(z0, opts).final_state;
}

ConvergenceTable convergence_study(const Scenario& scenario, const ConvergenceOptions& options) {
  if (options.resolutions.size() < 2)
    throw InvalidArgument("a convergence study needs at least two resolutions");
  const double length = options.length > 0.0 ? options.length : scenario.default_length;
  ConvergenceTable table;
  std::vector<std::optional<PhysicalState>> finals;
  for (const Resolution& res : options.resolutions) {
    ConvergenceRow row;
    row.n = res.n;
    row.dt = res.dt;
    row.error_l2 = row.error_linf = row.observed_order = kNaN;
    const Grid1D grid(length, res.n);
    try {
      finals.emplace_back(run_to(scenario, options.scheme, grid, res.dt, options.t_end,
                                 options.params, options.diff, options.newton_tol,
                                 options.newton_max_iter));
    } catch (const Error& e) {
      row.failure = std::string(e.kind()) + ": " + e.what();
      finals.emplace_back(std::nullopt);
    }
    table.rows.push_back(row);
  }
  const std::size_t rows = table.rows.size();
  for (std::size_t i = 0; i < rows; ++i) {
    if (!finals[i]) continue;
    const Field& h = finals[i]->h;
    if (scenario.has_exact()) {
      const PhysicalState ex = scenario.exact_solution(h.grid(), options.t_end);
      const ErrorNorms e = error_norms(*finals[i], ex);
      table.rows[i].error_l2 = e.h_l2;
      table.rows[i].error_linf = e.h_linf;
    } else if (i + 1 < rows && finals[i + 1]) {
      const PhysicalState fine{resample(finals[i + 1]->h, h.grid()),
                               resample(finals[i + 1]->u, h.grid()), options.t_end};
      const ErrorNorms e = error_norms(*finals[i], fine);
      table.rows[i].error_l2 = e.h_l2;
      table.rows[i].error_linf = e.h_linf;
    }
  }
  for (std::size_t i = 1; i < rows; ++i) {
    const double e0 = table.rows[i - 1].error_l2, e1 = table.rows[i].error_l2;
    const double dx0 = length / static_cast<double>(table.rows[i - 1].n);
    const double dx1 = length / static_cast<double>(table.rows[i].n);
    double ratio = dx0 / dx1;
    // Pure temporal refinement at fixed n.
    if (table.rows[i - 1].n == table.rows[i].n) ratio = table.rows[i - 1].dt / table.rows[i].dt;
    if (std::isfinite(e0) && std::isfinite(e1) && e0 > 0.0 && e1 > 0.0 && ratio != 1.0)
      table.rows[i].observed_order = std::log(e0 / e1) / std::log(ratio);
  }
  return table;
}

double linear_fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace sgn
