#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and an
// AVX2 version with the same per-element operation order, so the two agree bit
// for bit (the project is built with -ffp-contract=off).

#include <array>
#include <cstddef>
#include <string_view>

namespace sgn::kernels {

inline constexpr double kThird = 1.0 / 3.0;
inline constexpr double kSixth = 1.0 / 6.0;

/// Component order of the multi-symplectic state.
enum Slot : std::size_t { kH = 0, kPhi, kU, kV, kP, kQ, kR, kS, kSlots };

/// Non-constant entries of the Hessian of S.
enum HessSlot : std::size_t {
  kHU = 0, kHV, kHS, kUU, kUV, kUP, kUS, kVV, kVQ, kVS, kPS, kQS, kHessSlots
};

struct ZIn {
  std::array<const double*, kSlots> c;
};
struct ZOut {
  std::array<double*, kSlots> c;
};
struct HessOut {
  std::array<double*, kHessSlots> c;
};

enum class Level { scalar, avx2 };

struct Table {
  Level level;
  /// out_i = (f_{i+1} - f_{i-1}) * half_inv_dx, periodic.
  void (*fd2)(const double* f, std::size_t n, double half_inv_dx, double* out);
  /// out_i = (8 (f_{i+1} - f_{i-1}) - (f_{i+2} - f_{i-2})) * inv_12dx, periodic.
  void (*fd4)(const double* f, std::size_t n, double inv_12dx, double* out);
  void (*grad_s)(ZIn z, std::size_t n, double g, ZOut out);
  void (*hess_s)(ZIn z, std::size_t n, HessOut out);
  /// out = 0.25 ((a + b) + (c + d))
  void (*quad_average)(const double* a, const double* b, const double* c, const double* d,
                       std::size_t n, double* out);
};

const Table& scalar_table();
/// Null when the binary was built without AVX2 support.
const Table* avx2_table();

bool cpu_has_avx2();

/// The table selected at startup: AVX2 when the CPU supports it, unless the
/// environment variable SGN_SIMD=scalar forces the reference kernels.
const Table& active();

std::string_view to_string(Level level);

// Pointwise reference formulas shared by the scalar kernels and the structure module.
inline void grad_s_point(const double* z, double g, double* out) {
  const double h = z[kH], u = z[kU], v = z[kV], p = z[kP], q = z[kQ], r = z[kR], s = z[kS];
  const double ts = kThird * s;
  const double tsv = ts * v;
  const double tsu = ts * u;
  out[kH] = kSixth * v * v - 0.5 * u * u - tsv * u - g * h;
  out[kPhi] = 0.0;
  out[kU] = q - (u + tsv) * h + ts * p;
  out[kV] = (kThird * v - tsu) * h - kThird * p + ts * q;
  out[kP] = kThird * (u * s - v);
  out[kQ] = u + tsv;
  out[kR] = -ts;
  out[kS] = kThird * (p * u + q * v - r - h * u * v);
}

inline void hess_s_point(const double* z, double* out) {
  const double h = z[kH], u = z[kU], v = z[kV], p = z[kP], q = z[kQ], s = z[kS];
  const double ts = kThird * s;
  const double tsv = ts * v;
  const double tsu = ts * u;
  out[kHU] = -(u + tsv);
  out[kHV] = kThird * v - tsu;
  out[kHS] = -(kThird * u * v);
  out[kUU] = -h;
  out[kUV] = -(ts * h);
  out[kUP] = ts;
  out[kUS] = kThird * p - kThird * v * h;
  out[kVV] = kThird * h;
  out[kVQ] = ts;
  out[kVS] = kThird * q - kThird * u * h;
  out[kPS] = kThird * u;
  out[kQS] = kThird * v;
}

}  // namespace sgn::kernels
