// Compiled with -mavx2. Only raw pointers cross this translation unit's
// boundary so no AVX2-encoded inline template leaks into the rest of the build.
#include "sgn/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace sgn::kernels {
namespace {

constexpr std::size_t kW = 4;

inline __m256d neg(__m256d x) { return _mm256_xor_pd(x, _mm256_set1_pd(-0.0)); }

void fd2(const double* f, std::size_t n, double half_inv_dx, double* out) {
  const __m256d c = _mm256_set1_pd(half_inv_dx);
  std::size_t i = 1;
  for (; i + kW <= n - 1; i += kW) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i + 1), _mm256_loadu_pd(f + i - 1));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(d, c));
  }
  for (; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) * half_inv_dx;
  out[0] = (f[1] - f[n - 1]) * half_inv_dx;
  out[n - 1] = (f[0] - f[n - 2]) * half_inv_dx;
}

void fd4(const double* f, std::size_t n, double inv_12dx, double* out) {
  const __m256d c = _mm256_set1_pd(inv_12dx);
  const __m256d eight = _mm256_set1_pd(8.0);
  std::size_t i = 2;
  for (; i + kW <= n - 2; i += kW) {
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(f + i + 1), _mm256_loadu_pd(f + i - 1));
    const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(f + i + 2), _mm256_loadu_pd(f + i - 2));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(d1, eight), d2), c));
  }
  auto edge = [&](std::size_t j) {
    const std::size_t ip1 = (j + 1) % n, ip2 = (j + 2) % n;
    const std::size_t im1 = (j + n - 1) % n, im2 = (j + n - 2) % n;
    out[j] = ((f[ip1] - f[im1]) * 8.0 - (f[ip2] - f[im2])) * inv_12dx;
  };
  for (; i < n - 2; ++i) edge(i);
  edge(0);
  edge(1);
  edge(n - 2);
  edge(n - 1);
}

void grad_s(ZIn z, std::size_t n, double g, ZOut out) {
  const __m256d third = _mm256_set1_pd(kThird);
  const __m256d sixth = _mm256_set1_pd(kSixth);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d gv = _mm256_set1_pd(g);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d h = _mm256_loadu_pd(z.c[kH] + i);
    const __m256d u = _mm256_loadu_pd(z.c[kU] + i);
    const __m256d v = _mm256_loadu_pd(z.c[kV] + i);
    const __m256d p = _mm256_loadu_pd(z.c[kP] + i);
    const __m256d q = _mm256_loadu_pd(z.c[kQ] + i);
    const __m256d r = _mm256_loadu_pd(z.c[kR] + i);
    const __m256d s = _mm256_loadu_pd(z.c[kS] + i);
    const __m256d ts = _mm256_mul_pd(third, s);
    const __m256d tsv = _mm256_mul_pd(ts, v);
    const __m256d tsu = _mm256_mul_pd(ts, u);

    __m256d dh = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(sixth, v), v),
                               _mm256_mul_pd(_mm256_mul_pd(half, u), u));
    dh = _mm256_sub_pd(dh, _mm256_mul_pd(tsv, u));
    dh = _mm256_sub_pd(dh, _mm256_mul_pd(gv, h));

    const __m256d du = _mm256_add_pd(_mm256_sub_pd(q, _mm256_mul_pd(_mm256_add_pd(u, tsv), h)),
                                     _mm256_mul_pd(ts, p));
    const __m256d dv = _mm256_add_pd(
        _mm256_sub_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(third, v), tsu), h),
                      _mm256_mul_pd(third, p)),
        _mm256_mul_pd(ts, q));
    const __m256d dp = _mm256_mul_pd(third, _mm256_sub_pd(_mm256_mul_pd(u, s), v));
    const __m256d dq = _mm256_add_pd(u, tsv);
    const __m256d dr = neg(ts);
    __m256d ds = _mm256_add_pd(_mm256_mul_pd(p, u), _mm256_mul_pd(q, v));
    ds = _mm256_sub_pd(ds, r);
    ds = _mm256_sub_pd(ds, _mm256_mul_pd(_mm256_mul_pd(h, u), v));
    ds = _mm256_mul_pd(third, ds);

    _mm256_storeu_pd(out.c[kH] + i, dh);
    _mm256_storeu_pd(out.c[kPhi] + i, zero);
    _mm256_storeu_pd(out.c[kU] + i, du);
    _mm256_storeu_pd(out.c[kV] + i, dv);
    _mm256_storeu_pd(out.c[kP] + i, dp);
    _mm256_storeu_pd(out.c[kQ] + i, dq);
    _mm256_storeu_pd(out.c[kR] + i, dr);
    _mm256_storeu_pd(out.c[kS] + i, ds);
  }
  double zp[kSlots], gp[kSlots];
  for (; i < n; ++i) {
    for (std::size_t c = 0; c < kSlots; ++c) zp[c] = z.c[c][i];
    grad_s_point(zp, g, gp);
    for (std::size_t c = 0; c < kSlots; ++c) out.c[c][i] = gp[c];
  }
}

void hess_s(ZIn z, std::size_t n, HessOut out) {
  const __m256d third = _mm256_set1_pd(kThird);
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d h = _mm256_loadu_pd(z.c[kH] + i);
    const __m256d u = _mm256_loadu_pd(z.c[kU] + i);
    const __m256d v = _mm256_loadu_pd(z.c[kV] + i);
    const __m256d p = _mm256_loadu_pd(z.c[kP] + i);
    const __m256d q = _mm256_loadu_pd(z.c[kQ] + i);
    const __m256d s = _mm256_loadu_pd(z.c[kS] + i);
    const __m256d ts = _mm256_mul_pd(third, s);
    const __m256d tsv = _mm256_mul_pd(ts, v);
    const __m256d tsu = _mm256_mul_pd(ts, u);
    const __m256d tu = _mm256_mul_pd(third, u);
    const __m256d tv = _mm256_mul_pd(third, v);

    _mm256_storeu_pd(out.c[kHU] + i, neg(_mm256_add_pd(u, tsv)));
    _mm256_storeu_pd(out.c[kHV] + i, _mm256_sub_pd(tv, tsu));
    _mm256_storeu_pd(out.c[kHS] + i, neg(_mm256_mul_pd(tu, v)));
    _mm256_storeu_pd(out.c[kUU] + i, neg(h));
    _mm256_storeu_pd(out.c[kUV] + i, neg(_mm256_mul_pd(ts, h)));
    _mm256_storeu_pd(out.c[kUP] + i, ts);
    _mm256_storeu_pd(out.c[kUS] + i,
                     _mm256_sub_pd(_mm256_mul_pd(third, p), _mm256_mul_pd(tv, h)));
    _mm256_storeu_pd(out.c[kVV] + i, _mm256_mul_pd(third, h));
    _mm256_storeu_pd(out.c[kVQ] + i, ts);
    _mm256_storeu_pd(out.c[kVS] + i,
                     _mm256_sub_pd(_mm256_mul_pd(third, q), _mm256_mul_pd(tu, h)));
    _mm256_storeu_pd(out.c[kPS] + i, tu);
    _mm256_storeu_pd(out.c[kQS] + i, tv);
  }
  double zp[kSlots], hp[kHessSlots];
  for (; i < n; ++i) {
    for (std::size_t c = 0; c < kSlots; ++c) zp[c] = z.c[c][i];
    hess_s_point(zp, hp);
    for (std::size_t c = 0; c < kHessSlots; ++c) out.c[c][i] = hp[c];
  }
}

void quad_average(const double* a, const double* b, const double* c, const double* d,
                  std::size_t n, double* out) {
  const __m256d quarter = _mm256_set1_pd(0.25);
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d ab = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d cd = _mm256_add_pd(_mm256_loadu_pd(c + i), _mm256_loadu_pd(d + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(quarter, _mm256_add_pd(ab, cd)));
  }
  for (; i < n; ++i) out[i] = 0.25 * ((a[i] + b[i]) + (c[i] + d[i]));
}

}  // namespace

const Table* avx2_table() {
  static const Table table{Level::avx2, fd2, fd4, grad_s, hess_s, quad_average};
  return &table;
}

}  // namespace sgn::kernels

#else

namespace sgn::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace sgn::kernels

#endif
