#pragma once

// Multi-symplectic form of the Serre-Green-Naghdi equations,
//   M z_t + K z_x = grad S(z),
// with z = (h, phi, u, v, p, q, r, s), plus residual evaluators for the
// classical (h, u) equations, their conservation laws, and the relaxed
// variational principle the structure descends from.

#include <array>
#include <cstddef>
#include <vector>

#include "sgn/core.hpp"
#include "sgn/kernels.hpp"

namespace sgn {

struct Params {
  double g = 9.81;

  /// Throws InvalidArgument unless g > 0.
  void validate() const;
};

/// Depth h and depth-averaged velocity u at time t.
struct PhysicalState {
  Field h;
  Field u;
  double t = 0.0;

  const Grid1D& grid() const { return h.grid(); }
  /// Throws DryState when min(h) <= 0 and GridMismatch when h, u disagree.
  void validate() const;
};

inline constexpr std::size_t kZ = kernels::kSlots;
using kernels::kH;
using kernels::kP;
using kernels::kPhi;
using kernels::kQ;
using kernels::kR;
using kernels::kS;
using kernels::kU;
using kernels::kV;

using ZPoint = std::array<double, kZ>;
using ZMatrix = std::array<ZPoint, kZ>;

/// Eight fields on a common grid. phi holds full values phi(x_i); it is the
/// periodic part plus phi_slope * x_i, with the gauge point at x_0 = 0.
struct ZState {
  std::array<Field, kZ> c;
  double phi_slope = 0.0;
  double t = 0.0;

  Field& operator[](std::size_t i) { return c[i]; }
  const Field& operator[](std::size_t i) const { return c[i]; }
  const Grid1D& grid() const { return c[kH].grid(); }
  std::size_t size() const { return c[kH].size(); }

  ZPoint at(std::size_t i) const;
  void set(std::size_t i, const ZPoint& z);
  Field phi_periodic() const;

  static ZState zeros(const Grid1D& grid);
};

/// Constant skew-symmetric 8x8 matrix kept as its nonzero entries.
class SkewForm {
 public:
  struct Entry {
    std::size_t row;  // 0-based
    std::size_t col;
    double coeff;
  };

  /// Builds the form from its strictly upper entries; the lower mirror is added.
  static SkewForm from_upper(std::initializer_list<Entry> upper);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  double at(std::size_t row, std::size_t col) const;
  ZMatrix dense() const;
  ZPoint apply(const ZPoint& z) const;
  /// a . A . b
  double bilinear(const ZPoint& a, const ZPoint& b) const;
  std::size_t rank() const;

 private:
  std::vector<Entry> entries_;
};

const SkewForm& build_M();
const SkewForm& build_K();

double hamiltonian_S(const ZPoint& z, const Params& params);
ZPoint grad_S(const ZPoint& z, const Params& params);
ZMatrix hess_S(const ZPoint& z, const Params& params);

/// S after eliminating p, q, r: 1/2 h u^2 - 1/6 h v^2 - 1/2 g h^2 with v = -h u_x.
/// Not an energy density; exposed as a diagnostic only.
Field reduced_S(const PhysicalState& state, const DiffOperator& op, const Params& params);

/// Pointwise grad S over a whole state (dispatches to the SIMD kernels).
std::array<Field, kZ> grad_S(const ZState& z, const Params& params);

ZState lift(const PhysicalState& state, const DiffOperator& op);
PhysicalState project(const ZState& z);

/// Spatial derivative of every component; phi's secular slope is added back.
ZState z_derivative(const ZState& z, const DiffOperator& op);

/// M z_t + K z_x - grad S(z), row by row.
std::array<Field, kZ> ms_residual(const ZState& z, const ZState& z_t, const DiffOperator& op,
                                  const Params& params);

/// gamma = h (u_x^2 - u_xt - u u_xx)
Field vertical_acceleration(const PhysicalState& state, const Field& u_xt,
                            const DiffOperator& op);

/// Time derivatives of (h, u) supplied by the caller; the module never differences in time.
struct TimeDerivatives {
  Field h_t;
  Field u_t;
  Field u_xt;
};

Field residual_mass(const PhysicalState& state, const Field& h_t, const DiffOperator& op);
Field residual_momentum(const PhysicalState& state, const Field& u_t, const Field& u_xt,
                        const DiffOperator& op, const Params& params);
Field residual_momentum_flux(const PhysicalState& state, const TimeDerivatives& d,
                             const DiffOperator& op, const Params& params);
Field residual_energy(const PhysicalState& state, const TimeDerivatives& d,
                      const DiffOperator& op, const Params& params);
Field residual_tangential(const PhysicalState& state, const TimeDerivatives& d,
                         const DiffOperator& op, const Params& params);

/// Fields of the relaxed variational principle: depth, velocity u-bar, vertical
/// velocity v-tilde, multiplier mu-bar and potential phi-bar, with the
/// derivatives that appear in the Lagrangian and its Euler-Lagrange equations.
struct RelaxedFields {
  Field h, h_t, h_x;
  Field phi, phi_t, phi_x;
  Field u;
  Field v, v_t, v_x;
  Field mu, mu_x;
};

/// L = (h_t + mu h_x) phi - g h^2 / 2 + h [mu u - u^2/2 + nu v / 3 - v^2 / 6 + phi mu_x],
/// with the impermeability constraint nu = h_t + mu h_x substituted.
Field lagrangian_density(const RelaxedFields& f, const Params& params);

enum ElRow : std::size_t { kElU = 0, kElV, kElMu, kElPhi, kElH, kElRows };

/// Euler-Lagrange residuals for variations in u, v, mu, phi and h (in that order).
std::array<Field, kElRows> el_residuals(const RelaxedFields& f, const Params& params);

/// The combinations of multi-symplectic rows that the Euler-Lagrange residuals
/// reduce to once p = h v, q = h u, r = h u v, s = h_x and mu = u:
///   phi: -R2,  v: -3 R5,  mu: -R6,  h: -R1 - v R5 - u R6,  u: 0.
std::array<Field, kElRows> el_from_ms(const std::array<Field, kZ>& ms, const ZState& z);

/// Relaxed fields obtained from a lifted state with mu = u and its time derivative.
RelaxedFields relaxed_from_lift(const ZState& z, const ZState& z_t, const DiffOperator& op);

}  // namespace sgn
