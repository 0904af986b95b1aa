#include "sgn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgn/errors.hpp"
#include "sgn/fft.hpp"
#include "sgn/linalg.hpp"

namespace sgn {
namespace {

constexpr double kBlowup = 1e6;
constexpr double kPcgTol = 1e-12;
constexpr int kPcgMaxIter = 1000;

struct Stencil {
  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> coeffs;
};

Stencil stencil(DiffKind kind, double dx) {
  if (kind == DiffKind::fd2) return {{-1, 1}, {-0.5 / dx, 0.5 / dx}};
  const double a = 8.0 / (12.0 * dx), b = 1.0 / (12.0 * dx);
  return {{-2, -1, 1, 2}, {b, -a, a, -b}};
}

Field solve_banded(const Field& h, const Field& rhs, DiffKind kind) {
  const Grid1D& grid = h.grid();
  const std::size_t n = grid.size();
  const Stencil st = stencil(kind, grid.dx());
  const std::size_t radius = static_cast<std::size_t>(st.offsets.back());
  linalg::CyclicBandedMatrix a(n, 2 * radius);
  // A = diag(h) + D^T diag(h^3) D / 3, with D[k][k + o] = d_o.
  for (std::size_t i = 0; i < n; ++i) a.add(i, 0, h[i]);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = h[k] * h[k] * h[k] / 3.0;
    for (std::size_t p = 0; p < st.offsets.size(); ++p)
      for (std::size_t q = 0; q < st.offsets.size(); ++q) {
        const auto row = static_cast<std::size_t>(
            (static_cast<std::ptrdiff_t>(k + n) + st.offsets[p]) % static_cast<std::ptrdiff_t>(n));
        a.add(row, st.offsets[q] - st.offsets[p], st.coeffs[p] * st.coeffs[q] * w);
      }
  }
  const linalg::CyclicBandedCholesky chol(a);
  return Field(grid, chol.solve(rhs.values()));
}

Field apply_operator(const Field& h, const Field& h3, const Field& u, const DiffOperator& op) {
  return h * u - (1.0 / 3.0) * derivative(h3 * derivative(u, op), op);
}

Field solve_pcg(const Field& h, const Field& rhs, const DiffOperator& op) {
  const Grid1D& grid = h.grid();
  const Field h3 = h * h * h;
  const double c0 = h.mean(), c2 = h3.mean() / 3.0;
  auto precondition = [&](const Field& r) {
    return Field(grid, fft::apply_symbol(r.values(), grid.length(), [&](std::size_t, double k) {
                   return 1.0 / (c0 + c2 * k * k);
                 }));
  };
  auto dot = [](const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  const double target = kPcgTol * std::max(1.0, rhs.max_abs());
  Field u(grid);
  Field r = rhs;
  if (r.max_abs() <= target) return u;
  Field zr = precondition(r);
  Field p = zr;
  double rz = dot(r, zr);
  for (int it = 0; it < kPcgMaxIter; ++it) {
    const Field ap = apply_operator(h, h3, p, op);
    const double pap = dot(p, ap);
    if (!(pap > 0.0))
      throw SolverBreakdown("PCG lost positive definiteness (p.Ap = " + std::to_string(pap) + ")",
                            r.max_abs());
    const double alpha = rz / pap;
    u += alpha * p;
    r -= alpha * ap;
    if (r.max_abs() <= target) {
      // Confirm against the true residual; recursion drift can mask stagnation.
      const Field true_r = rhs - apply_operator(h, h3, u, op);
      if (true_r.max_abs() <= target) return u;
      r = true_r;
    }
    zr = precondition(r);
    const double rz_new = dot(r, zr);
    p = zr + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverBreakdown("PCG did not converge in " + std::to_string(kPcgMaxIter) + " iterations",
                        r.max_abs());
}

void check_finite_bounded(const HMState& s) {
  for (const Field* f : {&s.h, &s.m})
    for (std::size_t i = 0; i < f->size(); ++i)
      if (!std::isfinite((*f)[i]) || std::abs((*f)[i]) > kBlowup)
        throw InstabilityDetected("reference solver blew up at t = " + std::to_string(s.t) +
                                  ", x index " + std::to_string(i) + " (|" +
                                  (f == &s.h ? "h" : "m") + "| > 1e6 or non-finite)");
}

HMState combine(const HMState& s, double dt, const HMRates& k) {
  return {s.h + dt * k.h_t, s.m + dt * k.m_t, s.t + dt};
}

}  // namespace

void HMState::validate() const {
  require_same_grid(h, m);
  if (!(h.min() > 0.0)) throw DryState("depth is not strictly positive");
}

HMState m_from_u(const PhysicalState& state, const DiffOperator& op) {
  state.validate();
  const Field& h = state.h;
  const Field w = h * h * h * derivative(state.u, op);
  return {h, state.u - (1.0 / 3.0) * derivative(w, op) / h, state.t};
}

Field u_from_hm(const HMState& state, const DiffOperator& op) {
  state.validate();
  if (!(state.h.grid() == op.grid())) throw GridMismatch("operator grid differs from state grid");
  const Field rhs = state.h * state.m;
  if (op.kind() == DiffKind::fourier) return solve_pcg(state.h, rhs, op);
  return solve_banded(state.h, rhs, op.kind());
}

HMRates classical_rhs(const HMState& state, const DiffOperator& op, const Params& params) {
  const Field u = u_from_hm(state, op);
  const Field& h = state.h;
  const Field ux = derivative(u, op);
  const Field wx = derivative(h * h * h * ux, op);
  const Field flux = 0.5 * u * u + params.g * h - 0.5 * h * h * ux * ux - (1.0 / 3.0) * u * wx / h;
  return {-derivative(h * u, op), -derivative(flux, op)};
}

double default_reference_dt(const Field& h, const Params& params) {
  return 0.25 * h.grid().dx() / std::sqrt(params.g * h.max());
}

HMState rk4_step(const HMState& s, double dt, const DiffOperator& op, const Params& params) {
  check_finite_bounded(s);
  const HMRates k1 = classical_rhs(s, op, params);
  const HMRates k2 = classical_rhs(combine(s, 0.5 * dt, k1), op, params);
  const HMRates k3 = classical_rhs(combine(s, 0.5 * dt, k2), op, params);
  const HMRates k4 = classical_rhs(combine(s, dt, k3), op, params);
  HMState out{s.h + (dt / 6.0) * (k1.h_t + 2.0 * k2.h_t + 2.0 * k3.h_t + k4.h_t),
              s.m + (dt / 6.0) * (k1.m_t + 2.0 * k2.m_t + 2.0 * k3.m_t + k4.m_t), s.t + dt};
  check_finite_bounded(out);
  return out;
}

std::vector<HMState> rk4_run(const HMState& initial, double dt, double t_end,
                             const DiffOperator& op, const Params& params, std::size_t stride) {
  initial.validate();
  params.validate();
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_end >= initial.t)) throw InvalidArgument("t_end precedes the initial time");
  stride = std::max<std::size_t>(1, stride);
  const double span = t_end - initial.t;
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9 * span / dt));
  std::vector<HMState> out{initial};
  HMState s = initial;
  for (std::size_t k = 0; k < steps; ++k) {
    const double h = k + 1 < steps ? dt : t_end - (initial.t + static_cast<double>(k) * dt);
    s = rk4_step(s, h, op, params);
    if (k + 1 == steps) s.t = t_end;
    if ((k + 1) % stride == 0 || k + 1 == steps) out.push_back(s);
  }
  return out;
}

}  // namespace sgn
