#include "sgn/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgn {

using kernels::kSixth;
using kernels::kThird;

void Params::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("gravity g must be positive");
}

void PhysicalState::validate() const {
  require_same_grid(h, u);
  if (!(h.min() > 0.0))
    throw DryState("depth must be strictly positive (min h = " + std::to_string(h.min()) + ")");
}

ZPoint ZState::at(std::size_t i) const {
  ZPoint z;
  for (std::size_t k = 0; k < kZ; ++k) z[k] = c[k][i];
  return z;
}

void ZState::set(std::size_t i, const ZPoint& z) {
  for (std::size_t k = 0; k < kZ; ++k) c[k][i] = z[k];
}

Field ZState::phi_periodic() const {
  Field p = c[kPhi];
  const Grid1D& g = grid();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= phi_slope * g.x(i);
  return p;
}

ZState ZState::zeros(const Grid1D& grid) {
  ZState z;
  for (auto& f : z.c) f = Field(grid);
  return z;
}

SkewForm SkewForm::from_upper(std::initializer_list<Entry> upper) {
  SkewForm form;
  for (const Entry& e : upper) {
    if (e.row >= kZ || e.col >= kZ || e.row == e.col)
      throw InvalidArgument("skew form entries must be off-diagonal and in range");
    form.entries_.push_back(e);
    form.entries_.push_back({e.col, e.row, -e.coeff});
  }
  return form;
}

double SkewForm::at(std::size_t row, std::size_t col) const {
  double v = 0.0;
  for (const Entry& e : entries_)
    if (e.row == row && e.col == col) v += e.coeff;
  return v;
}

ZMatrix SkewForm::dense() const {
  ZMatrix a{};
  for (const Entry& e : entries_) a[e.row][e.col] += e.coeff;
  return a;
}

ZPoint SkewForm::apply(const ZPoint& z) const {
  ZPoint out{};
  for (const Entry& e : entries_) out[e.row] += e.coeff * z[e.col];
  return out;
}

double SkewForm::bilinear(const ZPoint& a, const ZPoint& b) const {
  double sum = 0.0;
  for (const Entry& e : entries_) sum += a[e.row] * e.coeff * b[e.col];
  return sum;
}

std::size_t SkewForm::rank() const {
  ZMatrix a = dense();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < kZ && rank < kZ; ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < kZ; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = rank + 1; r < kZ; ++r) {
      const double f = a[r][col] / a[rank][col];
      for (std::size_t c = col; c < kZ; ++c) a[r][c] -= f * a[rank][c];
    }
    ++rank;
  }
  return rank;
}

const SkewForm& build_M() {
  static const SkewForm m = SkewForm::from_upper({{kH, kPhi, 1.0}, {kH, kP, kThird}});
  return m;
}

const SkewForm& build_K() {
  static const SkewForm k = SkewForm::from_upper({{kH, kR, kThird}, {kPhi, kQ, -1.0}});
  return k;
}

double hamiltonian_S(const ZPoint& z, const Params& params) {
  const double h = z[kH], u = z[kU], v = z[kV], p = z[kP], q = z[kQ], r = z[kR], s = z[kS];
  if (!(h > 0.0)) throw DryState("S evaluated at nonpositive depth");
  return (kSixth * v * v - 0.5 * u * u - kThird * s * u * v) * h - 0.5 * params.g * h * h +
         kThird * p * (u * s - v) + q * (u + kThird * s * v) - kThird * r * s;
}

ZPoint grad_S(const ZPoint& z, const Params& params) {
  ZPoint out;
  kernels::grad_s_point(z.data(), params.g, out.data());
  return out;
}

ZMatrix hess_S(const ZPoint& z, const Params& params) {
  using namespace kernels;
  double e[kHessSlots];
  hess_s_point(z.data(), e);
  ZMatrix H{};
  auto put = [&H](std::size_t i, std::size_t j, double v) {
    H[i][j] = v;
    H[j][i] = v;
  };
  put(kH, kH, -params.g);
  put(kH, kU, e[kHU]);
  put(kH, kV, e[kHV]);
  put(kH, kS, e[kHS]);
  put(kU, kU, e[kUU]);
  put(kU, kV, e[kUV]);
  put(kU, kP, e[kUP]);
  put(kU, kQ, 1.0);
  put(kU, kS, e[kUS]);
  put(kV, kV, e[kVV]);
  put(kV, kP, -kThird);
  put(kV, kQ, e[kVQ]);
  put(kV, kS, e[kVS]);
  put(kP, kS, e[kPS]);
  put(kQ, kS, e[kQS]);
  put(kR, kS, -kThird);
  return H;
}

std::array<Field, kZ> grad_S(const ZState& z, const Params& params) {
  std::array<Field, kZ> out;
  kernels::ZIn in;
  kernels::ZOut o;
  for (std::size_t k = 0; k < kZ; ++k) {
    out[k] = Field(z.grid());
    in.c[k] = z[k].data();
    o.c[k] = out[k].data();
  }
  kernels::active().grad_s(in, z.size(), params.g, o);
  return out;
}

Field reduced_S(const PhysicalState& state, const DiffOperator& op, const Params& params) {
  state.validate();
  const Field& h = state.h;
  const Field& u = state.u;
  const Field v = -(h * derivative(u, op));
  return 0.5 * h * u * u - kSixth * h * v * v - 0.5 * params.g * h * h;
}

ZState lift(const PhysicalState& state, const DiffOperator& op) {
  state.validate();
  const Grid1D& grid = state.grid();
  ZState z;
  z.t = state.t;
  z[kH] = state.h;
  z[kU] = state.u;
  z[kS] = derivative(state.h, op);
  z[kV] = -(state.h * derivative(state.u, op));
  z[kP] = state.h * z[kV];
  z[kQ] = state.h * state.u;
  z[kR] = z[kQ] * z[kV];

  const Field phi_x = state.u + kThird * z[kS] * z[kV];
  const AntiderivativeSplit split = antiderivative_split(phi_x, op.kind());
  Field phi = split.periodic;
  const double anchor = phi[0];
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += split.mean * grid.x(i) - anchor;
  z[kPhi] = std::move(phi);
  z.phi_slope = split.mean;
  return z;
}

PhysicalState project(const ZState& z) { return {z[kH], z[kU], z.t}; }

ZState z_derivative(const ZState& z, const DiffOperator& op) {
  ZState d;
  d.t = z.t;
  for (std::size_t k = 0; k < kZ; ++k) {
    if (k == kPhi)
      d[k] = derivative(z.phi_periodic(), op) + z.phi_slope;
    else
      d[k] = derivative(z[k], op);
  }
  return d;
}

std::array<Field, kZ> ms_residual(const ZState& z, const ZState& z_t, const DiffOperator& op,
                                  const Params& params) {
  for (std::size_t k = 0; k < kZ; ++k) {
    require_same_grid(z[k], z[kH]);
    require_same_grid(z_t[k], z[kH]);
  }
  if (!(op.grid() == z.grid())) throw GridMismatch("ms_residual: operator grid differs");
  const ZState z_x = z_derivative(z, op);
  std::array<Field, kZ> res = grad_S(z, params);
  for (Field& f : res) f *= -1.0;
  for (const auto& e : build_M().entries()) res[e.row] += e.coeff * z_t[e.col];
  for (const auto& e : build_K().entries()) res[e.row] += e.coeff * z_x[e.col];
  return res;
}

Field vertical_acceleration(const PhysicalState& state, const Field& u_xt,
                            const DiffOperator& op) {
  const Field u_x = derivative(state.u, op);
  const Field u_xx = derivative(u_x, op);
  return state.h * (u_x * u_x - u_xt - state.u * u_xx);
}

Field residual_mass(const PhysicalState& state, const Field& h_t, const DiffOperator& op) {
  require_same_grid(state.h, h_t);
  require_same_grid(state.h, state.u);
  return h_t + derivative(state.h * state.u, op);
}

Field residual_momentum(const PhysicalState& state, const Field& u_t, const Field& u_xt,
                        const DiffOperator& op, const Params& params) {
  state.validate();
  const Field& h = state.h;
  const Field& u = state.u;
  const Field gamma = vertical_acceleration(state, u_xt, op);
  return u_t + u * derivative(u, op) + params.g * derivative(h, op) +
         kThird * derivative(h * h * gamma, op) / h;
}

Field residual_momentum_flux(const PhysicalState& state, const TimeDerivatives& d,
                             const DiffOperator& op, const Params& params) {
  state.validate();
  const Field& h = state.h;
  const Field& u = state.u;
  const Field gamma = vertical_acceleration(state, d.u_xt, op);
  const Field density_t = d.h_t * u + h * d.u_t;
  const Field flux = h * u * u + 0.5 * params.g * h * h + kThird * h * h * gamma;
  return density_t + derivative(flux, op);
}

Field residual_energy(const PhysicalState& state, const TimeDerivatives& d,
                      const DiffOperator& op, const Params& params) {
  state.validate();
  const Field& h = state.h;
  const Field& u = state.u;
  const Field u_x = derivative(u, op);
  const Field gamma = vertical_acceleration(state, d.u_xt, op);
  const Field density_t = 0.5 * d.h_t * u * u + h * u * d.u_t +
                          0.5 * h * h * d.h_t * u_x * u_x + kThird * h * h * h * u_x * d.u_xt +
                          params.g * h * d.h_t;
  const Field flux =
      (0.5 * u * u + kSixth * h * h * u_x * u_x + params.g * h + kThird * h * gamma) * h * u;
  return density_t + derivative(flux, op);
}

Field residual_tangential(const PhysicalState& state, const TimeDerivatives& d,
                          const DiffOperator& op, const Params& params) {
  state.validate();
  const Field& h = state.h;
  const Field& u = state.u;
  const Field u_x = derivative(u, op);
  const Field w = h * h * h * u_x;
  const Field w_x = derivative(w, op);
  const Field w_t = 3.0 * h * h * d.h_t * u_x + h * h * h * d.u_xt;
  const Field density_t = d.u_t - kThird * (derivative(w_t, op) / h - d.h_t * w_x / (h * h));
  const Field flux = 0.5 * u * u + params.g * h - 0.5 * h * h * u_x * u_x - kThird * u * w_x / h;
  return density_t + derivative(flux, op);
}

Field lagrangian_density(const RelaxedFields& f, const Params& params) {
  const Field nu = f.h_t + f.mu * f.h_x;
  return nu * f.phi - 0.5 * params.g * f.h * f.h +
         f.h * (f.mu * f.u - 0.5 * f.u * f.u + kThird * nu * f.v - kSixth * f.v * f.v +
                f.phi * f.mu_x);
}

std::array<Field, kElRows> el_residuals(const RelaxedFields& f, const Params& params) {
  std::array<Field, kElRows> r;
  r[kElU] = f.mu - f.u;
  r[kElV] = f.h_t + f.mu * f.h_x - f.v;
  r[kElMu] = f.u + kThird * f.v * f.h_x - f.phi_x;
  r[kElPhi] = f.h_t + (f.h_x * f.mu + f.h * f.mu_x);
  r[kElH] = f.mu * f.u - 0.5 * f.u * f.u - kSixth * f.v * f.v - f.mu * f.phi_x - f.phi_t -
            params.g * f.h - kThird * f.h * (f.v_t + f.mu * f.v_x + f.v * f.mu_x);
  return r;
}

std::array<Field, kElRows> el_from_ms(const std::array<Field, kZ>& ms, const ZState& z) {
  std::array<Field, kElRows> r;
  r[kElU] = Field(z.grid());
  r[kElV] = -3.0 * ms[kP];
  r[kElMu] = -ms[kQ];
  r[kElPhi] = -ms[kPhi];
  r[kElH] = -ms[kH] - z[kV] * ms[kP] - z[kU] * ms[kQ];
  return r;
}

RelaxedFields relaxed_from_lift(const ZState& z, const ZState& z_t, const DiffOperator& op) {
  const ZState z_x = z_derivative(z, op);
  RelaxedFields f;
  f.h = z[kH];
  f.h_t = z_t[kH];
  f.h_x = z_x[kH];
  f.phi = z[kPhi];
  f.phi_t = z_t[kPhi];
  f.phi_x = z_x[kPhi];
  f.u = z[kU];
  f.v = z[kV];
  f.v_t = z_t[kV];
  f.v_x = z_x[kV];
  f.mu = z[kU];
  f.mu_x = z_x[kU];
  return f;
}

}  // namespace sgn
