#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sgn/errors.hpp"

namespace sgn {

/// Uniform periodic grid on [0, L) with points x_i = i * dx.
class Grid1D {
 public:
  static constexpr std::size_t kMinPoints = 8;

  Grid1D(double length, std::size_t n);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_); }
  double x(std::size_t i) const noexcept { return static_cast<double>(i) * dx(); }
  std::vector<double> coordinates() const;

  /// Box-scheme runs need odd n; even grids carry a checkerboard null mode.
  bool even() const noexcept { return n_ % 2 == 0; }

  bool operator==(const Grid1D& other) const noexcept {
    return length_ == other.length_ && n_ == other.n_;
  }

 private:
  double length_;
  std::size_t n_;
};

/// Real samples on a Grid1D. Arithmetic is pointwise and checks grids.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid1D& grid, double value = 0.0);
  Field(const Grid1D& grid, std::vector<double> values);

  template <class Fn>
  static Field from_function(const Grid1D& grid, Fn&& fn) {
    Field f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) f.values_[i] = fn(grid.x(i));
    return f;
  }

  const Grid1D& grid() const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double min() const;
  double max() const;
  double max_abs() const;
  double mean() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(const Field& o);
  Field& operator/=(const Field& o);
  Field& operator+=(double a);
  Field& operator-=(double a);
  Field& operator*=(double a);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator/(Field a, const Field& b) { return a /= b; }
  friend Field operator+(Field a, double b) { return a += b; }
  friend Field operator+(double b, Field a) { return a += b; }
  friend Field operator-(Field a, double b) { return a -= b; }
  friend Field operator-(double b, Field a) {
    a *= -1.0;
    return a += b;
  }
  friend Field operator*(Field a, double b) { return a *= b; }
  friend Field operator*(double b, Field a) { return a *= b; }
  friend Field operator-(Field a) { return a *= -1.0; }

  template <class Fn>
  Field map(Fn&& fn) const {
    Field out(*this);
    for (double& v : out.values_) v = fn(v);
    return out;
  }

 private:
  void check_same(const Field& o) const;

  std::shared_ptr<const Grid1D> grid_;
  std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b);

enum class DiffKind { fd2, fd4, fourier };

std::string_view to_string(DiffKind kind);
DiffKind diff_kind_from_string(std::string_view name);

/// A periodic first-derivative operator on a fixed grid.
class DiffOperator {
 public:
  DiffOperator(DiffKind kind, const Grid1D& grid) : kind_(kind), grid_(grid) {}

  DiffKind kind() const noexcept { return kind_; }
  const Grid1D& grid() const noexcept { return grid_; }

 private:
  DiffKind kind_;
  Grid1D grid_;
};

Field derivative(const Field& f, const DiffOperator& op);

/// Rectangle rule, which coincides with the trapezoid rule on a periodic grid.
double integrate(const Field& f);

struct AntiderivativeSplit {
  double mean;      // c
  Field periodic;   // F, zero mean, derivative(F) + c ~ f
};

AntiderivativeSplit antiderivative_split(const Field& f, DiffKind kind);

/// Fourier resampling of a smooth periodic field onto another grid of the same length.
Field resample(const Field& f, const Grid1D& target);

/// Trigonometric interpolant of f evaluated at an arbitrary x.
double evaluate_at(const Field& f, double x);

/// Shift a smooth periodic field by `shift` in x, i.e. returns g(x) = f(x - shift).
Field translate(const Field& f, double shift);

}  // namespace sgn
