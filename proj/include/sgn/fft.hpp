#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sgn::fft {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized real-to-complex DFT; returns n/2 + 1 coefficients.
Spectrum forward(std::span<const double> x);

/// Inverse of `forward` including the 1/n normalization.
std::vector<double> inverse(const Spectrum& c, std::size_t n);

/// Angular wavenumber of coefficient m on a periodic domain of the given length.
/// The Nyquist coefficient of an even-length transform is reported as 0.
double wavenumber(std::size_t m, std::size_t n, double length);

/// Multiplies every coefficient by sym(k) and transforms back.
template <class Symbol>
std::vector<double> apply_symbol(std::span<const double> x, double length, Symbol&& sym) {
  const std::size_t n = x.size();
  Spectrum c = forward(x);
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= sym(m, wavenumber(m, n, length));
  return inverse(c, n);
}

}  // namespace sgn::fft
