#include "sgn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>

namespace sgn::fft {
namespace {

struct Plans {
  fftw_plan r2c;
  fftw_plan c2r;
};

struct PlanCache {
  std::map<std::size_t, Plans> plans;
  ~PlanCache() {
    for (auto& [n, p] : plans) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }
};

// FFTW planning is not thread-safe; execution on new arrays is.
const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static PlanCache cache;
  std::lock_guard lock(mutex);
  auto it = cache.plans.find(n);
  if (it != cache.plans.end()) return it->second;

  const int ni = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p{fftw_plan_dft_r2c_1d(ni, real, cplx, flags),
          fftw_plan_dft_c2r_1d(ni, cplx, real, flags | FFTW_DESTROY_INPUT)};
  fftw_free(real);
  fftw_free(cplx);
  return cache.plans.emplace(n, p).first->second;
}

}  // namespace

Spectrum forward(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> in(x.begin(), x.end());
  Spectrum out(n / 2 + 1);
  fftw_execute_dft_r2c(plans_for(n).r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse(const Spectrum& c, std::size_t n) {
  Spectrum work(c);
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(work.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

double wavenumber(std::size_t m, std::size_t n, double length) {
  if (n % 2 == 0 && m == n / 2) return 0.0;
  return 2.0 * std::numbers::pi * static_cast<double>(m) / length;
}

}  // namespace sgn::fft
