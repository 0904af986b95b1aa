#include "sgn/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "sgn/fft.hpp"
#include "sgn/kernels.hpp"

namespace sgn {

Grid1D::Grid1D(double length, std::size_t n) : length_(length), n_(n) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidArgument("grid length must be positive and finite");
  if (n < kMinPoints)
    throw InvalidArgument("grid needs at least " + std::to_string(kMinPoints) + " points, got " +
                          std::to_string(n));
}

std::vector<double> Grid1D::coordinates() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

Field::Field(const Grid1D& grid, double value)
    : grid_(std::make_shared<const Grid1D>(grid)), values_(grid.size(), value) {}

Field::Field(const Grid1D& grid, std::vector<double> values)
    : grid_(std::make_shared<const Grid1D>(grid)), values_(std::move(values)) {
  if (values_.size() != grid.size())
    throw GridMismatch("field has " + std::to_string(values_.size()) + " values for a grid of " +
                       std::to_string(grid.size()));
}

const Grid1D& Field::grid() const {
  if (!grid_) throw InvalidArgument("field is not attached to a grid");
  return *grid_;
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

void Field::check_same(const Field& o) const {
  if (grid_ != o.grid_ && !(grid() == o.grid())) throw GridMismatch("fields live on different grids");
}

Field& Field::operator+=(const Field& o) {
  check_same(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
Field& Field::operator-=(const Field& o) {
  check_same(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
Field& Field::operator*=(const Field& o) {
  check_same(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}
Field& Field::operator/=(const Field& o) {
  check_same(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] /= o.values_[i];
  return *this;
}
Field& Field::operator+=(double a) {
  for (double& v : values_) v += a;
  return *this;
}
Field& Field::operator-=(double a) {
  for (double& v : values_) v -= a;
  return *this;
}
Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

std::string_view to_string(DiffKind kind) {
  switch (kind) {
    case DiffKind::fd2: return "fd2";
    case DiffKind::fd4: return "fd4";
    case DiffKind::fourier: return "fourier";
  }
  return "?";
}

DiffKind diff_kind_from_string(std::string_view name) {
  if (name == "fd2") return DiffKind::fd2;
  if (name == "fd4") return DiffKind::fd4;
  if (name == "fourier") return DiffKind::fourier;
  throw InvalidArgument("unknown differentiation operator '" + std::string(name) +
                        "' (expected fd2, fd4 or fourier)");
}

Field derivative(const Field& f, const DiffOperator& op) {
  if (!(f.grid() == op.grid())) throw GridMismatch("derivative: field and operator grids differ");
  const Grid1D& grid = op.grid();
  const std::size_t n = grid.size();
  Field out(grid);
  switch (op.kind()) {
    case DiffKind::fd2:
      kernels::active().fd2(f.data(), n, 0.5 / grid.dx(), out.data());
      break;
    case DiffKind::fd4:
      kernels::active().fd4(f.data(), n, 1.0 / (12.0 * grid.dx()), out.data());
      break;
    case DiffKind::fourier: {
      auto d = fft::apply_symbol(f.values(), grid.length(), [](std::size_t, double k) {
        return std::complex<double>(0.0, k);
      });
      return Field(grid, std::move(d));
    }
  }
  return out;
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().dx();
}

AntiderivativeSplit antiderivative_split(const Field& f, DiffKind kind) {
  const Grid1D& grid = f.grid();
  const std::size_t n = grid.size();
  const double c = f.mean();
  if (kind == DiffKind::fourier) {
    auto F = fft::apply_symbol(f.values(), grid.length(),
                               [](std::size_t, double k) -> std::complex<double> {
                                 if (k == 0.0) return 0.0;
                                 return std::complex<double>(0.0, -1.0 / k);
                               });
    return {c, Field(grid, std::move(F))};
  }
  // Cumulative trapezoid of the zero-mean part, then remove the mean.
  const double dx = grid.dx();
  std::vector<double> F(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    F[i + 1] = F[i] + 0.5 * dx * ((f[i] - c) + (f[i + 1] - c));
  const double mean = std::accumulate(F.begin(), F.end(), 0.0) / static_cast<double>(n);
  for (double& v : F) v -= mean;
  return {c, Field(grid, std::move(F))};
}

Field resample(const Field& f, const Grid1D& target) {
  const Grid1D& src = f.grid();
  if (std::abs(src.length() - target.length()) > 1e-12 * src.length())
    throw GridMismatch("resample: grids must cover the same length");
  const std::size_t n1 = src.size(), n2 = target.size();
  fft::Spectrum c = fft::forward(f.values());
  // Keep modes strictly below both Nyquist limits.
  const std::size_t keep = (std::min(n1, n2) - 1) / 2;
  fft::Spectrum out(n2 / 2 + 1, 0.0);
  const double scale = static_cast<double>(n2) / static_cast<double>(n1);
  for (std::size_t m = 0; m <= keep; ++m) out[m] = c[m] * scale;
  return Field(target, fft::inverse(out, n2));
}

double evaluate_at(const Field& f, double x) {
  const Grid1D& grid = f.grid();
  const std::size_t n = grid.size();
  fft::Spectrum c = fft::forward(f.values());
  const std::size_t top = (n - 1) / 2;
  double sum = c[0].real();
  for (std::size_t m = 1; m <= top; ++m) {
    const double k = fft::wavenumber(m, n, grid.length());
    sum += 2.0 * (c[m] * std::polar(1.0, k * x)).real();
  }
  if (n % 2 == 0) {
    const double k = 2.0 * std::numbers::pi * static_cast<double>(n / 2) / grid.length();
    sum += c[n / 2].real() * std::cos(k * x);
  }
  return sum / static_cast<double>(n);
}

Field translate(const Field& f, double shift) {
  const Grid1D& grid = f.grid();
  const std::size_t n = grid.size();
  auto g = fft::apply_symbol(f.values(), grid.length(),
                             [&](std::size_t m, double k) -> std::complex<double> {
                               if (n % 2 == 0 && m == n / 2) return 0.0;
                               return std::polar(1.0, -k * shift);
                             });
  return Field(grid, std::move(g));
}

}  // namespace sgn
