#pragma once

#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

/// A real scalar function together with its gradient and Hessian along the
/// real axes of the grid.
///
/// Oscillatory corrections are added with closed-form derivatives, so the
/// carried derivatives stay exact even when the values themselves are too
/// fine for finite differences.
struct ScalarJet {
  ScalarField value;
  std::vector<ScalarField> grad;
  std::vector<ScalarField> hess;  // row-major dims x dims, symmetric

  explicit ScalarJet(const Grid& grid);
  /// Derivatives taken by finite differences.
  static ScalarJet from_field(const ScalarField& f);

  const Grid& grid() const noexcept { return value.grid(); }
  int dims() const noexcept { return static_cast<int>(grad.size()); }
  const ScalarField& hess_at(int a, int b) const { return hess[a * dims() + b]; }
  ScalarField& hess_at(int a, int b) { return hess[a * dims() + b]; }

  ScalarJet& operator*=(double s);
  ScalarJet& operator+=(const ScalarJet& o);
  ScalarJet& operator-=(const ScalarJet& o);
};

/// A vector map with n components and its Jacobian along the real axes:
/// `jac[i][a]` is the derivative of component i along axis a.
struct VectorJet {
  std::vector<ScalarField> value;
  std::vector<std::vector<ScalarField>> jac;

  VectorJet(const Grid& grid, int components);
  static VectorJet from_field(const VectorField& w);

  const Grid& grid() const noexcept { return value.front().grid(); }
  int components() const noexcept { return static_cast<int>(value.size()); }

  VectorJet& operator*=(double s);
  VectorJet& operator-=(const VectorJet& o);
};

ScalarJet operator-(ScalarJet a, const ScalarJet& b);
VectorJet operator-(VectorJet a, const VectorJet& b);

}  // namespace s2hess
