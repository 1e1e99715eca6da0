#include "s2hess/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace s2hess {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::unsupported_order: return "unsupported-order";
    case ErrorCode::wrong_ambient: return "wrong-ambient";
    case ErrorCode::under_resolved_mollifier: return "under-resolved-mollifier";
    case ErrorCode::invalid_exponent: return "invalid-exponent";
    case ErrorCode::support_violation: return "support-violation";
    case ErrorCode::empty_battery: return "empty-battery";
    case ErrorCode::dimension_unsupported: return "dimension-unsupported";
    case ErrorCode::undefined_ratio: return "undefined-ratio";
    case ErrorCode::too_far_from_identity: return "too-far-from-identity";
    case ErrorCode::diagonalization_failed: return "diagonalization-failed";
    case ErrorCode::hypothesis_violation: return "hypothesis-violation";
    case ErrorCode::schedule_infeasible: return "schedule-infeasible";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

const char* to_string(Ambient kind) noexcept {
  return kind == Ambient::complex ? "complex" : "real";
}

const char* to_string(Symmetry sym) noexcept {
  switch (sym) {
    case Symmetry::hermitian: return "hermitian";
    case Symmetry::real_symmetric: return "real-symmetric";
    case Symmetry::none: return "none";
  }
  return "none";
}

// ---------------------------------------------------------------- Grid

Grid::Grid(Ambient kind, int n, int points_per_axis, int interior_margin)
    : kind_(kind), n_(n), points_(points_per_axis), margin_(interior_margin) {
  require(n >= 1, ErrorCode::invalid_argument, "grid: n must be positive");
  require(points_per_axis >= 8, ErrorCode::invalid_argument,
          "grid: need at least 8 points per axis, got " + std::to_string(points_per_axis));
  require(interior_margin >= 0, ErrorCode::invalid_argument, "grid: negative margin");
  dims_ = kind == Ambient::complex ? 2 * n : n;
  h_ = 1.0 / (points_ - 1);
  require(margin_ * h_ < 0.5, ErrorCode::invalid_argument,
          "grid: interior margin leaves an empty sub-box");
  strides_.assign(dims_, 1);
  for (int a = dims_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * points_;
  size_ = strides_[0] * points_;
}

std::vector<int> Grid::unflatten(std::size_t flat) const {
  std::vector<int> idx(dims_);
  for (int a = 0; a < dims_; ++a) idx[a] = coord(flat, a);
  return idx;
}

std::size_t Grid::flatten(std::span<const int> idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dims_; ++a) f += strides_[a] * static_cast<std::size_t>(idx[a]);
  return f;
}

bool Grid::in_interior(std::size_t flat) const noexcept {
  for (int a = 0; a < dims_; ++a) {
    const int c = coord(flat, a);
    if (c < margin_ || c > points_ - 1 - margin_) return false;
  }
  return true;
}

bool Grid::on_boundary(std::size_t flat) const noexcept {
  for (int a = 0; a < dims_; ++a) {
    const int c = coord(flat, a);
    if (c == 0 || c == points_ - 1) return true;
  }
  return false;
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const Grid& grid, cplx fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), ErrorCode::invalid_argument,
          "scalar field: value array does not match grid shape");
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<cplx(std::span<const double>)>& fn) {
  ScalarField out(grid);
  const int d = grid.dims();
  std::vector<int> idx(d, 0);
  std::vector<double> x(d, 0.0);
  const double h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values_[i] = fn(x);
    // Row-major odometer: the last axis runs fastest.
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < grid.points()) {
        x[a] = idx[a] * h;
        break;
      }
      idx[a] = 0;
      x[a] = 0.0;
    }
  }
  return out;
}

bool ScalarField::real_flag() const noexcept {
  double re = 0.0, im = 0.0;
  for (const auto& v : values_) {
    re = std::max(re, std::abs(v.real()));
    im = std::max(im, std::abs(v.imag()));
  }
  return im <= 1e-10 * re || (im == 0.0);
}

ScalarField ScalarField::real_part() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = values_[i].real();
  return out;
}

ScalarField ScalarField::conj() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = std::conj(values_[i]);
  return out;
}

namespace {
void check_same(const Grid& a, const Grid& b) {
  require(a.same_shape(b), ErrorCode::invalid_argument, "fields live on different grids");
}
}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(cplx s) {
  for (auto& v : values_) v += s;
  return *this;
}

ScalarField& ScalarField::axpy(cplx s, const ScalarField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
  return *this;
}

double ScalarField::max_abs() const noexcept {
  double m2 = 0.0;
  for (const auto& v : values_) m2 = std::max(m2, std::norm(v));
  return std::sqrt(m2);
}

double ScalarField::interior_max_abs() const noexcept {
  double m2 = 0.0;
  grid_.for_each_interior_run([&](std::size_t first, std::size_t count) {
    for (std::size_t i = first; i < first + count; ++i) m2 = std::max(m2, std::norm(values_[i]));
  });
  return std::sqrt(m2);
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(const Grid& grid, int components) {
  require(components >= 1, ErrorCode::invalid_argument, "vector field needs components");
  comps_.assign(components, ScalarField(grid));
}

VectorField::VectorField(std::vector<ScalarField> components) : comps_(std::move(components)) {
  require(!comps_.empty(), ErrorCode::invalid_argument, "vector field needs components");
  for (const auto& c : comps_) check_same(c.grid(), comps_.front().grid());
}

// ---------------------------------------------------------------- MatrixField

MatrixField::MatrixField(const Grid& grid, int order, Symmetry sym)
    : order_(order), sym_(sym), entries_(static_cast<std::size_t>(order) * order, ScalarField(grid)) {
  require(order >= 1, ErrorCode::invalid_argument, "matrix field order must be positive");
}

MatrixField MatrixField::identity(const Grid& grid, Symmetry sym, double scale) {
  MatrixField m(grid, grid.n(), sym);
  for (int i = 0; i < m.order_; ++i) m(i, i) += scale;
  return m;
}

MatrixField MatrixField::scalar_identity(const ScalarField& s, Symmetry sym) {
  MatrixField m(s.grid(), s.grid().n(), sym);
  for (int i = 0; i < m.order_; ++i) m(i, i) = s;
  return m;
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  require(order_ == o.order_, ErrorCode::invalid_argument, "matrix order mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
  return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& o) {
  require(order_ == o.order_, ErrorCode::invalid_argument, "matrix order mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
  return *this;
}

MatrixField& MatrixField::operator*=(double s) {
  for (auto& e : entries_) e *= s;
  return *this;
}

MatrixField& MatrixField::add_identity(double s) {
  for (int i = 0; i < order_; ++i) (*this)(i, i) += s;
  return *this;
}

double MatrixField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.max_abs());
  return m;
}

double MatrixField::interior_max_abs() const noexcept {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.interior_max_abs());
  return m;
}

double MatrixField::max_offdiag_abs() const noexcept {
  double m = 0.0;
  for (int i = 0; i < order_; ++i)
    for (int j = 0; j < order_; ++j)
      if (i != j) m = std::max(m, (*this)(i, j).max_abs());
  return m;
}

double MatrixField::symmetry_defect() const noexcept {
  const double scale = std::max(max_abs(), 1e-300);
  double worst = 0.0;
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) {
      const auto& a = (*this)(i, j).values();
      const auto& b = (*this)(j, i).values();
      for (std::size_t k = 0; k < a.size(); ++k) {
        double d = 0.0;
        switch (sym_) {
          case Symmetry::hermitian: d = std::abs(a[k] - std::conj(b[k])); break;
          case Symmetry::real_symmetric:
            d = std::max(std::abs(a[k] - b[k]), std::abs(a[k].imag()));
            break;
          case Symmetry::none: break;
        }
        worst = std::max(worst, d);
      }
    }
  }
  return worst / scale;
}

MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
MatrixField operator*(double s, MatrixField a) { return a *= s; }

}  // namespace s2hess
