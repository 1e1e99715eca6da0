#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "s2hess/error.hpp"

namespace s2hess {

using cplx = std::complex<double>;

enum class Ambient { real, complex };
enum class Symmetry { hermitian, real_symmetric, none };

const char* to_string(Ambient kind) noexcept;
const char* to_string(Symmetry sym) noexcept;

/// Uniform grid on the unit box [0,1]^d with d = n (real) or 2n (complex).
///
/// Complex grids store z_j = x_j + i y_j on the axis pair (2j, 2j+1), so the
/// real axis of z_j is `x_axis(j)` and the imaginary one `y_axis(j)`.
/// Norm measurements only look at nodes at least `margin()` cells away from
/// the boundary.
class Grid {
 public:
  Grid(Ambient kind, int n, int points_per_axis, int interior_margin = 0);

  Ambient kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  int dims() const noexcept { return dims_; }
  int points() const noexcept { return points_; }
  double spacing() const noexcept { return h_; }
  int margin() const noexcept { return margin_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  int x_axis(int j) const noexcept { return kind_ == Ambient::complex ? 2 * j : j; }
  int y_axis(int j) const noexcept { return 2 * j + 1; }

  /// Per-axis index of a flat offset (row-major, axis 0 slowest).
  int coord(std::size_t flat, int axis) const noexcept {
    return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(points_));
  }
  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const int> idx) const;

  bool in_interior(std::size_t flat) const noexcept;
  bool on_boundary(std::size_t flat) const noexcept;
  /// Physical lower/upper edge of the interior sub-box.
  double interior_lo() const noexcept { return margin_ * h_; }
  double interior_hi() const noexcept { return 1.0 - margin_ * h_; }

  /// Calls fn(first, count) for every contiguous run of interior nodes
  /// along the last (fastest) axis.
  template <typename Fn>
  void for_each_interior_run(Fn&& fn) const {
    const int lo = margin_, hi = points_ - 1 - margin_;
    if (hi < lo) return;
    std::vector<int> idx(dims_ > 1 ? dims_ - 1 : 0, lo);
    const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
    while (true) {
      std::size_t base = lo;
      for (int a = 0; a + 1 < dims_; ++a) base += idx[a] * strides_[a];
      fn(base, count);
      int a = dims_ - 2;
      while (a >= 0 && ++idx[a] > hi) idx[a--] = lo;
      if (a < 0) return;
    }
  }

  Grid with_margin(int interior_margin) const { return Grid(kind_, n_, points_, interior_margin); }

  bool same_shape(const Grid& o) const noexcept {
    return kind_ == o.kind_ && n_ == o.n_ && points_ == o.points_;
  }
  bool operator==(const Grid& o) const noexcept {
    return same_shape(o) && margin_ == o.margin_;
  }

 private:
  Ambient kind_;
  int n_;
  int dims_;
  int points_;
  double h_;
  int margin_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

/// Complex samples of a function on a Grid.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, cplx fill = 0.0);
  ScalarField(const Grid& grid, std::vector<cplx> values);

  /// Samples fn(x) at every node, x in physical coordinates.
  static ScalarField sample(const Grid& grid,
                            const std::function<cplx(std::span<const double>)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& values() noexcept { return values_; }
  cplx operator[](std::size_t i) const noexcept { return values_[i]; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }

  /// True when max|Im| <= 1e-10 * max|Re| (or everything is zero).
  bool real_flag() const noexcept;
  ScalarField real_part() const;
  ScalarField conj() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(cplx s);
  ScalarField& operator+=(cplx s);
  /// this += s * o
  ScalarField& axpy(cplx s, const ScalarField& o);

  double max_abs() const noexcept;
  double interior_max_abs() const noexcept;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(cplx s, ScalarField a);

/// Ordered collection of scalar components on one grid.
class VectorField {
 public:
  VectorField(const Grid& grid, int components);
  explicit VectorField(std::vector<ScalarField> components);

  const Grid& grid() const noexcept { return comps_.front().grid(); }
  int components() const noexcept { return static_cast<int>(comps_.size()); }
  const ScalarField& operator[](int i) const { return comps_.at(i); }
  ScalarField& operator[](int i) { return comps_.at(i); }

 private:
  std::vector<ScalarField> comps_;
};

/// n x n matrix of scalar fields with a declared symmetry class.
class MatrixField {
 public:
  MatrixField(const Grid& grid, int order, Symmetry sym);

  static MatrixField identity(const Grid& grid, Symmetry sym, double scale = 1.0);
  /// (scalar) * Id
  static MatrixField scalar_identity(const ScalarField& s, Symmetry sym);

  const Grid& grid() const noexcept { return entries_.front().grid(); }
  int order() const noexcept { return order_; }
  Symmetry symmetry() const noexcept { return sym_; }
  void set_symmetry(Symmetry sym) noexcept { sym_ = sym; }

  const ScalarField& operator()(int i, int j) const { return entries_.at(i * order_ + j); }
  ScalarField& operator()(int i, int j) { return entries_.at(i * order_ + j); }

  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator-=(const MatrixField& o);
  MatrixField& operator*=(double s);
  MatrixField& add_identity(double s);

  /// Largest |entry| over all entries and nodes (whole grid).
  double max_abs() const noexcept;
  double interior_max_abs() const noexcept;
  double max_offdiag_abs() const noexcept;

  /// Largest relative violation of the declared symmetry class.
  double symmetry_defect() const noexcept;

 private:
  int order_;
  Symmetry sym_;
  std::vector<ScalarField> entries_;
};

MatrixField operator+(MatrixField a, const MatrixField& b);
MatrixField operator-(MatrixField a, const MatrixField& b);
MatrixField operator*(double s, MatrixField a);

inline Symmetry natural_symmetry(Ambient kind) noexcept {
  return kind == Ambient::complex ? Symmetry::hermitian : Symmetry::real_symmetric;
}

}  // namespace s2hess
