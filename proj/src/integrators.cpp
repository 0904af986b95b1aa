#include "sgn/integrators.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "sgn/kernels.hpp"
#include "sgn/reference.hpp"

namespace sgn {
namespace {

constexpr int kMaxHalvings = 12;

double max_norm(const std::array<Field, kZ>& r) {
  double m = 0.0;
  for (const Field& f : r) m = std::max(m, f.max_abs());
  return m;
}

std::string even_grid_hint(const Grid1D& grid) {
  if (!grid.even()) return "";
  return "; the grid has an even number of points, so the periodic two-point average has an "
         "alternating (checkerboard) null vector: rerun with an odd n";
}

/// Structural nonzeros of M, K and the Hessian of S.
std::array<std::array<bool, kZ>, kZ> jacobian_mask() {
  std::array<std::array<bool, kZ>, kZ> mask{};
  for (const auto& e : build_M().entries()) mask[e.row][e.col] = true;
  for (const auto& e : build_K().entries()) mask[e.row][e.col] = true;
  ZPoint probe;
  for (std::size_t k = 0; k < kZ; ++k) probe[k] = 1.0 + 0.1 * static_cast<double>(k);
  const ZMatrix H = hess_S(probe, Params{});
  for (std::size_t r = 0; r < kZ; ++r)
    for (std::size_t c = 0; c < kZ; ++c)
      if (H[r][c] != 0.0) mask[r][c] = true;
  return mask;
}

ZMatrix hessian_from_slots(const std::array<std::vector<double>, kernels::kHessSlots>& e,
                           std::size_t i, double g) {
  using namespace kernels;
  ZMatrix H{};
  auto sym = [&H](std::size_t a, std::size_t b, double v) {
    H[a][b] = v;
    H[b][a] = v;
  };
  sym(kH, kH, -g);
  sym(kU, kQ, 1.0);
  sym(kV, kP, -kThird);
  sym(kR, kS, -kThird);
  sym(kH, kU, e[kHU][i]);
  sym(kH, kV, e[kHV][i]);
  sym(kH, kS, e[kHS][i]);
  sym(kU, kU, e[kUU][i]);
  sym(kU, kV, e[kUV][i]);
  sym(kU, kP, e[kUP][i]);
  sym(kU, kS, e[kUS][i]);
  sym(kV, kV, e[kVV][i]);
  sym(kV, kQ, e[kVQ][i]);
  sym(kV, kS, e[kVS][i]);
  sym(kP, kS, e[kPS][i]);
  sym(kQ, kS, e[kQS][i]);
  return H;
}

void check_state(const ZState& z, const Grid1D& grid) {
  if (!(z.grid() == grid)) throw GridMismatch("state grid differs from the scheme grid");
  if (!(z[kH].min() > 0.0)) throw DryState("depth is not strictly positive");
}

/// Neighbour values z_{i+1} with the phi jump across the periodic seam.
Field shifted(const ZState& z, std::size_t comp) {
  const Field& f = z[comp];
  const std::size_t n = f.size();
  Field out(f.grid());
  for (std::size_t i = 0; i + 1 < n; ++i) out[i] = f[i + 1];
  out[n - 1] = f[0];
  if (comp == kPhi) out[n - 1] += z.phi_slope * f.grid().length();
  return out;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

void BoxSchemeConfig::validate() const {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be nonzero and finite");
  if (!(newton_tol > 0.0)) throw InvalidArgument("newton_tol must be positive");
  if (newton_max_iter < 1) throw InvalidArgument("newton_max_iter must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
}

// ---------------------------------------------------------------------------
// Box scheme

struct BoxScheme::Impl {
  Grid1D grid;
  std::array<std::array<bool, kZ>, kZ> mask = jacobian_mask();
  ZMatrix M = build_M().dense();
  ZMatrix K = build_K().dense();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::optional<ZState> last_input;
  double last_dt = 0.0;

  explicit Impl(const Grid1D& g) : grid(g) {}

  std::array<Field, kZ> hat_state(const ZState& a, const ZState& b, double theta) const {
    std::array<Field, kZ> hat;
    const std::size_t n = grid.size();
    for (std::size_t k = 0; k < kZ; ++k) {
      const Field a_hi = shifted(a, k), b_hi = shifted(b, k);
      hat[k] = Field(grid);
      if (theta == 0.5) {
        kernels::active().quad_average(a[k].data(), a_hi.data(), b[k].data(), b_hi.data(), n,
                                       hat[k].data());
      } else {
        for (std::size_t i = 0; i < n; ++i)
          hat[k][i] = 0.5 * ((1.0 - theta) * (a[k][i] + a_hi[i]) + theta * (b[k][i] + b_hi[i]));
      }
    }
    return hat;
  }

  std::array<std::vector<double>, kernels::kHessSlots> hessians(
      const std::array<Field, kZ>& hat) const {
    const std::size_t n = grid.size();
    std::array<std::vector<double>, kernels::kHessSlots> e;
    kernels::ZIn in;
    kernels::HessOut out;
    for (std::size_t k = 0; k < kZ; ++k) in.c[k] = hat[k].data();
    for (std::size_t k = 0; k < kernels::kHessSlots; ++k) {
      e[k].assign(n, 0.0);
      out.c[k] = e[k].data();
    }
    kernels::active().hess_s(in, n, out);
    return e;
  }

  std::array<Field, kZ> residual(const ZState& zn, const ZState& znp1, double dt, double theta,
                                 const Params& params) const {
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    const auto hat = hat_state(zn, znp1, theta);
    std::array<Field, kZ> grad;
    kernels::ZIn in;
    kernels::ZOut out;
    for (std::size_t k = 0; k < kZ; ++k) {
      grad[k] = Field(grid);
      in.c[k] = hat[k].data();
      out.c[k] = grad[k].data();
    }
    kernels::active().grad_s(in, n, params.g, out);

    std::array<Field, kZ> dbar, dtil;
    for (std::size_t k = 0; k < kZ; ++k) {
      const Field a_hi = shifted(zn, k), b_hi = shifted(znp1, k);
      dbar[k] = Field(grid);
      dtil[k] = Field(grid);
      for (std::size_t i = 0; i < n; ++i) {
        const double bar_n = 0.5 * (zn[k][i] + a_hi[i]);
        const double bar_np1 = 0.5 * (znp1[k][i] + b_hi[i]);
        dbar[k][i] = (bar_np1 - bar_n) / dt;
        const double til_lo = (1.0 - theta) * zn[k][i] + theta * znp1[k][i];
        const double til_hi = (1.0 - theta) * a_hi[i] + theta * b_hi[i];
        dtil[k][i] = (til_hi - til_lo) / dx;
      }
    }
    std::array<Field, kZ> res;
    for (std::size_t k = 0; k < kZ; ++k) res[k] = -grad[k];
    for (const auto& e : build_M().entries()) res[e.row] += e.coeff * dbar[e.col];
    for (const auto& e : build_K().entries()) res[e.row] += e.coeff * dtil[e.col];
    return res;
  }

  /// Jacobian of the cell residuals with respect to one time level.
  /// new_level: d/dz^{n+1}; otherwise d/dz^n.
  Eigen::SparseMatrix<double> jacobian(const std::array<Field, kZ>& hat, double dt, double theta,
                                       const Params& params, bool new_level) const {
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    const auto e = hessians(hat);
    const double wt = new_level ? theta : 1.0 - theta;
    const double msign = new_level ? 1.0 : -1.0;
    Triplets trip;
    trip.reserve(n * 2 * kZ * kZ);
    for (std::size_t i = 0; i < n; ++i) {
      const ZMatrix H = hessian_from_slots(e, i, params.g);
      const std::size_t j = (i + 1) % n;
      for (std::size_t r = 0; r < kZ; ++r)
        for (std::size_t c = 0; c < kZ; ++c) {
          if (!mask[r][c]) continue;
          const double common = msign * M[r][c] / (2.0 * dt) - 0.5 * wt * H[r][c];
          const double kterm = wt * K[r][c] / dx;
          const auto row = static_cast<int>(kZ * i + r);
          trip.emplace_back(row, static_cast<int>(kZ * i + c), common - kterm);
          trip.emplace_back(row, static_cast<int>(kZ * j + c), common + kterm);
        }
    }
    const auto dim = static_cast<Eigen::Index>(kZ * n);
    Eigen::SparseMatrix<double> J(dim, dim);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    return J;
  }

  void factorize(const Eigen::SparseMatrix<double>& J) {
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      throw SingularJacobian("box-scheme Jacobian factorization failed: " + lu.lastErrorMessage() +
                             even_grid_hint(grid));
  }

  Eigen::VectorXd solve_checked(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs) {
    Eigen::VectorXd x = lu.solve(rhs);
    const double rn = rhs.lpNorm<Eigen::Infinity>();
    const double lin = (J * x - rhs).lpNorm<Eigen::Infinity>();
    if (!x.allFinite() || lin > 1e-6 * rn + 1e-300)
    {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.3e", lin);
      throw SingularJacobian(std::string("box-scheme Jacobian is numerically singular (linear residual ") +
                             buf + ")" + even_grid_hint(grid));
    }
    return x;
  }
};

namespace {

Eigen::VectorXd pack(const std::array<Field, kZ>& r) {
  const std::size_t n = r[0].size();
  Eigen::VectorXd v(static_cast<Eigen::Index>(kZ * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < kZ; ++k) v(static_cast<Eigen::Index>(kZ * i + k)) = r[k][i];
  return v;
}

Eigen::VectorXd pack(const ZState& z) { return pack(z.c); }

void add_unpacked(ZState& z, const Eigen::VectorXd& d, double scale) {
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < kZ; ++k) z[k][i] += scale * d(static_cast<Eigen::Index>(kZ * i + k));
}

ZState unpack_like(const ZState& like, const Eigen::VectorXd& d) {
  ZState z = ZState::zeros(like.grid());
  z.t = like.t;
  add_unpacked(z, d, 1.0);
  return z;
}

}  // namespace

BoxScheme::BoxScheme(const Grid1D& grid, BoxSchemeConfig cfg, Params params, double theta)
    : cfg_(cfg), params_(params), theta_(theta), impl_(std::make_unique<Impl>(grid)) {
  cfg_.validate();
  params_.validate();
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in (0, 1]");
}

BoxScheme::~BoxScheme() = default;
BoxScheme::BoxScheme(BoxScheme&&) noexcept = default;
BoxScheme& BoxScheme::operator=(BoxScheme&&) noexcept = default;

void BoxScheme::forget_history() { impl_->last_input.reset(); }

void BoxScheme::set_dt(double dt) {
  cfg_.dt = dt;
  cfg_.validate();
}

std::array<Field, kZ> BoxScheme::residual(const ZState& z_n, const ZState& z_np1) const {
  return impl_->residual(z_n, z_np1, cfg_.dt, theta_, params_);
}

ZState BoxScheme::step(const ZState& z, StepReport* report) {
  check_state(z, impl_->grid);
  ZState guess = z;
  const auto& prev = impl_->last_input;
  if (prev && std::abs(prev->t + impl_->last_dt - z.t) <= 1e-9 * std::max(1.0, std::abs(z.t)) &&
      prev->phi_slope == z.phi_slope) {
    const double ratio = cfg_.dt / impl_->last_dt;
    for (std::size_t k = 0; k < kZ; ++k) guess[k] += ratio * (z[k] - (*prev)[k]);
    if (!(guess[kH].min() > 0.0)) guess = z;
  }
  ZState out = step_from_guess(z, guess, report);
  impl_->last_input = z;
  impl_->last_dt = cfg_.dt;
  return out;
}

ZState BoxScheme::step_from_guess(const ZState& z, const ZState& guess, StepReport* report) {
  check_state(z, impl_->grid);
  Impl& im = *impl_;
  const double dt = cfg_.dt;
  ZState x = guess;
  x.t = z.t + dt;
  x.phi_slope = z.phi_slope;

  auto res = im.residual(z, x, dt, theta_, params_);
  double rnorm = max_norm(res);
  std::vector<double> trace{rnorm};
  int iter = 0;
  while (rnorm > cfg_.newton_tol && iter < cfg_.newton_max_iter) {
    const auto hat = im.hat_state(z, x, theta_);
    const auto J = im.jacobian(hat, dt, theta_, params_, true);
    im.factorize(J);
    const Eigen::VectorXd delta = im.solve_checked(J, -pack(res));

    double lambda = cfg_.damping;
    ZState trial = x;
    std::array<Field, kZ> trial_res;
    double trial_norm = 0.0;
    for (int halving = 0;; ++halving) {
      trial = x;
      add_unpacked(trial, delta, lambda);
      const bool dry = !(trial[kH].min() > 0.0);
      if (!dry) {
        trial_res = im.residual(z, trial, dt, theta_, params_);
        trial_norm = max_norm(trial_res);
        if (trial_norm <= rnorm || halving >= kMaxHalvings) break;
      } else if (halving >= kMaxHalvings) {
        throw DryState("box-scheme Newton iterate lost positive depth");
      }
      lambda *= 0.5;
    }
    x = std::move(trial);
    res = std::move(trial_res);
    rnorm = trial_norm;
    trace.push_back(rnorm);
    ++iter;
  }
  if (report) *report = {iter, rnorm, trace};
  if (!(rnorm <= cfg_.newton_tol)) {
    std::ostringstream msg;
    msg << "box-scheme Newton did not reach tolerance " << cfg_.newton_tol << " in " << iter
        << " iterations (residual " << rnorm << ")" << even_grid_hint(im.grid);
    throw NewtonDivergence(msg.str(), trace);
  }
  return x;
}

ZState BoxScheme::tangent(const ZState& z_n, const ZState& z_np1, const ZState& dz_n) const {
  Impl& im = *impl_;
  const auto hat = im.hat_state(z_n, z_np1, theta_);
  const auto J_old = im.jacobian(hat, cfg_.dt, theta_, params_, false);
  const auto J_new = im.jacobian(hat, cfg_.dt, theta_, params_, true);
  im.factorize(J_new);
  const Eigen::VectorXd rhs = -(J_old * pack(dz_n));
  const Eigen::VectorXd d = im.solve_checked(J_new, rhs);
  ZState out = unpack_like(dz_n, d);
  out.t = dz_n.t + cfg_.dt;
  return out;
}

TangentPair BoxScheme::tangent(const ZState& z_n, const ZState& z_np1,
                               const TangentPair& pair_n) const {
  return {tangent(z_n, z_np1, pair_n.first), tangent(z_n, z_np1, pair_n.second)};
}

ZState box_step(const ZState& z, const BoxSchemeConfig& cfg, const Params& params,
                StepReport* report) {
  BoxScheme scheme(z.grid(), cfg, params);
  return scheme.step(z, report);
}

ZState euler_box_step(const ZState& z, const BoxSchemeConfig& cfg, const Params& params,
                      StepReport* report) {
  BoxScheme scheme(z.grid(), cfg, params, 1.0);
  return scheme.step(z, report);
}

TangentPair tangent_box_step(const ZState& z_n, const ZState& z_np1, const TangentPair& pair,
                             const BoxSchemeConfig& cfg, const Params& params) {
  BoxScheme scheme(z_n.grid(), cfg, params);
  return scheme.tangent(z_n, z_np1, pair);
}

Field discrete_twoform_residual(const ZState& z_n, const ZState& z_np1,
                                const TangentPair& pair_n, const TangentPair& pair_np1,
                                const Grid1D& grid, double dt) {
  if (!(z_n.grid() == grid) || !(z_np1.grid() == grid) || !(pair_n.first.grid() == grid) ||
      !(pair_np1.first.grid() == grid))
    throw GridMismatch("two-form residual: inconsistent grids");
  const SkewForm M = build_M();
  const SkewForm K = build_K();
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  auto point_avg = [&](const ZState& a, std::size_t i) {
    const std::size_t j = (i + 1) % n;
    ZPoint p;
    for (std::size_t k = 0; k < kZ; ++k) p[k] = 0.5 * (a[k][i] + a[k][j]);
    return p;
  };
  auto time_avg = [&](const ZState& a, const ZState& b, std::size_t i) {
    ZPoint p;
    for (std::size_t k = 0; k < kZ; ++k) p[k] = 0.5 * (a[k][i] + b[k][i]);
    return p;
  };
  // <A a, b> = b . A . a
  auto omega = [&](const TangentPair& pr, std::size_t i) {
    return M.bilinear(point_avg(pr.second, i), point_avg(pr.first, i));
  };
  std::vector<double> kappa(n);
  for (std::size_t i = 0; i < n; ++i)
    kappa[i] = K.bilinear(time_avg(pair_n.second, pair_np1.second, i),
                          time_avg(pair_n.first, pair_np1.first, i));
  Field out(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    out[i] = (omega(pair_np1, i) - omega(pair_n, i)) / dt + (kappa[j] - kappa[i]) / dx;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral implicit midpoint

struct SpectralMidpoint::Impl {
  Grid1D grid;
  DiffOperator op;
  Eigen::MatrixXd D;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool have_lu = false;
  double lu_dt = 0.0;
  std::optional<ZState> last_input;
  double last_dt = 0.0;

  explicit Impl(const Grid1D& g) : grid(g), op(DiffKind::fourier, g) {
    const std::size_t n = g.size();
    D.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      Field e(g);
      e[j] = 1.0;
      const Field d = derivative(e, op);
      for (std::size_t i = 0; i < n; ++i)
        D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d[i];
    }
  }

  static ZState midpoint(const ZState& a, const ZState& b) {
    ZState m = a;
    for (std::size_t k = 0; k < kZ; ++k) m[k] = 0.5 * (a[k] + b[k]);
    m.t = 0.5 * (a.t + b.t);
    return m;
  }

  std::array<Field, kZ> residual(const ZState& zn, const ZState& znp1, double dt,
                                 const Params& params) const {
    const ZState mid = midpoint(zn, znp1);
    const ZState dmid = z_derivative(mid, op);
    std::array<Field, kZ> res = grad_S(mid, params);
    for (Field& f : res) f *= -1.0;
    for (const auto& e : build_M().entries())
      res[e.row] += (e.coeff / dt) * (znp1[e.col] - zn[e.col]);
    for (const auto& e : build_K().entries()) res[e.row] += e.coeff * dmid[e.col];
    return res;
  }

  // Unknowns ordered component-major: index c * n + i.
  Eigen::MatrixXd jacobian(const ZState& zn, const ZState& znp1, double dt,
                           const Params& params) const {
    const std::size_t n = grid.size();
    const auto N = static_cast<Eigen::Index>(kZ * n);
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
    for (const auto& e : build_M().entries())
      for (Eigen::Index i = 0; i < ni; ++i)
        J(static_cast<Eigen::Index>(e.row) * ni + i, static_cast<Eigen::Index>(e.col) * ni + i) +=
            e.coeff / dt;
    for (const auto& e : build_K().entries())
      J.block(static_cast<Eigen::Index>(e.row) * ni, static_cast<Eigen::Index>(e.col) * ni, ni,
              ni) += (0.5 * e.coeff) * D;
    const ZState mid = midpoint(zn, znp1);
    for (std::size_t i = 0; i < n; ++i) {
      const ZMatrix H = hess_S(mid.at(i), params);
      for (std::size_t r = 0; r < kZ; ++r)
        for (std::size_t c = 0; c < kZ; ++c)
          if (H[r][c] != 0.0)
            J(static_cast<Eigen::Index>(r * n + i), static_cast<Eigen::Index>(c * n + i)) -=
                0.5 * H[r][c];
    }
    return J;
  }
};

namespace {

Eigen::VectorXd pack_component_major(const std::array<Field, kZ>& r) {
  const std::size_t n = r[0].size();
  Eigen::VectorXd v(static_cast<Eigen::Index>(kZ * n));
  for (std::size_t k = 0; k < kZ; ++k)
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(k * n + i)) = r[k][i];
  return v;
}

}  // namespace

SpectralMidpoint::SpectralMidpoint(const Grid1D& grid, BoxSchemeConfig cfg, Params params)
    : cfg_(cfg), params_(params), impl_(std::make_unique<Impl>(grid)) {
  cfg_.validate();
  params_.validate();
}

SpectralMidpoint::~SpectralMidpoint() = default;
SpectralMidpoint::SpectralMidpoint(SpectralMidpoint&&) noexcept = default;
SpectralMidpoint& SpectralMidpoint::operator=(SpectralMidpoint&&) noexcept = default;

void SpectralMidpoint::forget_history() { impl_->last_input.reset(); }

void SpectralMidpoint::set_dt(double dt) {
  cfg_.dt = dt;
  cfg_.validate();
}

std::array<Field, kZ> SpectralMidpoint::residual(const ZState& z_n, const ZState& z_np1) const {
  return impl_->residual(z_n, z_np1, cfg_.dt, params_);
}

ZState SpectralMidpoint::step(const ZState& z, StepReport* report) {
  Impl& im = *impl_;
  check_state(z, im.grid);
  const double dt = cfg_.dt;
  const std::size_t n = im.grid.size();

  ZState x = z;
  const auto& prev = im.last_input;
  if (prev && std::abs(prev->t + im.last_dt - z.t) <= 1e-9 * std::max(1.0, std::abs(z.t))) {
    const double ratio = dt / im.last_dt;
    for (std::size_t k = 0; k < kZ; ++k) x[k] += ratio * (z[k] - (*prev)[k]);
    if (!(x[kH].min() > 0.0)) x = z;
  }
  x.t = z.t + dt;
  x.phi_slope = z.phi_slope;

  auto res = im.residual(z, x, dt, params_);
  double rnorm = max_norm(res);
  std::vector<double> trace{rnorm};
  int iter = 0;
  // The factorization is kept across iterations and steps (chord Newton) and
  // refreshed whenever an iterate fails to halve the residual.
  bool fresh = false;
  auto refactor = [&] {
    im.lu.compute(im.jacobian(z, x, dt, params_));
    if (!(im.lu.rcond() > 1e-15))
      throw SingularJacobian("spectral-midpoint Jacobian is numerically singular");
    im.lu_dt = dt;
    im.have_lu = true;
    fresh = true;
  };
  if (!im.have_lu || im.lu_dt != dt) refactor();
  while (rnorm > cfg_.newton_tol && iter < cfg_.newton_max_iter) {
    const Eigen::VectorXd delta = im.lu.solve(-pack_component_major(res));
    if (!delta.allFinite()) throw SingularJacobian("spectral-midpoint Newton step is not finite");
    double lambda = cfg_.damping;
    ZState trial = x;
    std::array<Field, kZ> trial_res;
    double trial_norm = 0.0;
    bool retry = false;
    for (int halving = 0;; ++halving) {
      trial = x;
      for (std::size_t k = 0; k < kZ; ++k)
        for (std::size_t i = 0; i < n; ++i)
          trial[k][i] += lambda * delta(static_cast<Eigen::Index>(k * n + i));
      const bool wet = trial[kH].min() > 0.0;
      if (wet) {
        trial_res = im.residual(z, trial, dt, params_);
        trial_norm = max_norm(trial_res);
        if (trial_norm <= 0.5 * rnorm) break;
      }
      if (!fresh) {
        retry = true;
        break;
      }
      if (halving >= kMaxHalvings) {
        if (!wet) throw DryState("spectral-midpoint Newton iterate lost positive depth");
        break;
      }
      lambda *= 0.5;
    }
    if (retry) {
      refactor();
      continue;
    }
    x = std::move(trial);
    res = std::move(trial_res);
    rnorm = trial_norm;
    trace.push_back(rnorm);
    ++iter;
    fresh = false;
  }
  if (report) *report = {iter, rnorm, trace};
  if (!(rnorm <= cfg_.newton_tol)) {
    std::ostringstream msg;
    msg << "spectral-midpoint Newton did not reach tolerance " << cfg_.newton_tol << " in "
        << iter << " iterations (residual " << rnorm << ")";
    throw NewtonDivergence(msg.str(), trace);
  }
  im.last_input = z;
  im.last_dt = dt;
  return x;
}

ZState spectral_midpoint_step(const ZState& z, const BoxSchemeConfig& cfg, const Params& params,
                              StepReport* report) {
  SpectralMidpoint scheme(z.grid(), cfg, params);
  return scheme.step(z, report);
}

// ---------------------------------------------------------------------------
// Runs

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::box: return "box";
    case Scheme::spectral_midpoint: return "spectral-midpoint";
    case Scheme::reference_rk4: return "reference-rk4";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "box") return Scheme::box;
  if (name == "spectral-midpoint") return Scheme::spectral_midpoint;
  if (name == "reference-rk4") return Scheme::reference_rk4;
  throw InvalidArgument("unknown scheme '" + std::string(name) +
                        "' (expected box, spectral-midpoint or reference-rk4)");
}

RunSummary run_simulation(const ZState& initial, const RunOptions& options,
                          const SnapshotCallback& callback) {
  options.cfg.validate();
  options.params.validate();
  const double t0 = initial.t;
  if (!(options.t_end > t0)) throw InvalidArgument("t_end must exceed the initial time");
  if (!(options.cfg.dt > 0.0)) throw InvalidArgument("dt must be positive for a run");
  const std::size_t stride = std::max<std::size_t>(1, options.snapshot_stride);
  const double dt = options.cfg.dt;
  const auto total =
      static_cast<long>(std::ceil((options.t_end - t0) / dt - 1e-9 * (options.t_end - t0) / dt));

  RunSummary summary;
  auto emit = [&](long step, const PhysicalState& state, const ZState* z, int iters) {
    if (callback && (step % static_cast<long>(stride) == 0 || step == total))
      callback(Snapshot{step, state.t, state, z, iters, step == total});
  };
  auto step_dt = [&](long step) {
    // The last step absorbs the remainder so the run ends exactly at t_end.
    if (step + 1 < total) return dt;
    return options.t_end - (t0 + static_cast<double>(total - 1) * dt);
  };

  if (options.scheme == Scheme::reference_rk4) {
    const DiffOperator op(options.diff, initial.grid());
    HMState hm = m_from_u(project(initial), op);
    emit(0, project(initial), nullptr, 0);
    for (long step = 0; step < total; ++step) {
      try {
        hm = rk4_step(hm, step_dt(step), op, options.params);
        hm.t = t0 + (step + 1 == total ? options.t_end - t0 : static_cast<double>(step + 1) * dt);
      } catch (const Error& e) {
        throw RunFailure(std::string("step ") + std::to_string(step + 1) + " at t=" +
                             std::to_string(hm.t) + ": " + e.what(),
                         e.kind(), step + 1, hm.t);
      }
      const PhysicalState state{hm.h, u_from_hm(hm, op), hm.t};
      emit(step + 1, state, nullptr, 0);
      summary.final_state = state;
    }
    summary.steps = total;
    return summary;
  }

  ZState z = initial;
  std::optional<BoxScheme> box;
  std::optional<SpectralMidpoint> spectral;
  if (options.scheme == Scheme::box)
    box.emplace(initial.grid(), options.cfg, options.params);
  else
    spectral.emplace(initial.grid(), options.cfg, options.params);

  emit(0, project(z), &z, 0);
  for (long step = 0; step < total; ++step) {
    StepReport report;
    const double h = step_dt(step);
    try {
      if (box) {
        box->set_dt(h);
        z = box->step(z, &report);
      } else {
        spectral->set_dt(h);
        z = spectral->step(z, &report);
      }
    } catch (const Error& e) {
      throw RunFailure(std::string("step ") + std::to_string(step + 1) + " at t=" +
                           std::to_string(z.t) + ": " + e.what(),
                       e.kind(), step + 1, z.t);
    }
    if (step + 1 == total) z.t = options.t_end;
    summary.newton_iters += report.newton_iters;
    emit(step + 1, project(z), &z, report.newton_iters);
  }
  summary.final_state = project(z);
  summary.steps = total;
  return summary;
}

}  // namespace sgn
