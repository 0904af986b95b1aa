#include "sgn/kernels.hpp"

namespace sgn::kernels {
namespace {

void fd2(const double* f, std::size_t n, double half_inv_dx, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = i + 1 == n ? 0 : i + 1;
    const std::size_t im = i == 0 ? n - 1 : i - 1;
    out[i] = (f[ip] - f[im]) * half_inv_dx;
  }
}

void fd4(const double* f, std::size_t n, double inv_12dx, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip1 = (i + 1) % n, ip2 = (i + 2) % n;
    const std::size_t im1 = (i + n - 1) % n, im2 = (i + n - 2) % n;
    out[i] = ((f[ip1] - f[im1]) * 8.0 - (f[ip2] - f[im2])) * inv_12dx;
  }
}

void grad_s(ZIn z, std::size_t n, double g, ZOut out) {
  double zp[kSlots], gp[kSlots];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < kSlots; ++c) zp[c] = z.c[c][i];
    grad_s_point(zp, g, gp);
    for (std::size_t c = 0; c < kSlots; ++c) out.c[c][i] = gp[c];
  }
}

void hess_s(ZIn z, std::size_t n, HessOut out) {
  double zp[kSlots], hp[kHessSlots];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < kSlots; ++c) zp[c] = z.c[c][i];
    hess_s_point(zp, hp);
    for (std::size_t c = 0; c < kHessSlots; ++c) out.c[c][i] = hp[c];
  }
}

void quad_average(const double* a, const double* b, const double* c, const double* d,
                  std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.25 * ((a[i] + b[i]) + (c[i] + d[i]));
}

}  // namespace

const Table& scalar_table() {
  static const Table table{Level::scalar, fd2, fd4, grad_s, hess_s, quad_average};
  return table;
}

}  // namespace sgn::kernels
