#pragma once

#include <span>
#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

// Finite-difference derivatives on the full grid. Interior nodes use central
// second-order stencils, boundary nodes use second-order one-sided ones, and
// higher orders along one axis are compositions of the first- and
// second-order operators.

/// `orders[a]` is the number of derivatives along axis a; the total must be <= 4.
ScalarField derivative(const ScalarField& f, std::span<const int> orders);
ScalarField derivative(const ScalarField& f, int axis);
ScalarField derivative(const ScalarField& f, int axis_a, int axis_b);

/// d/dz_j = (d/dx_j - i d/dy_j)/2, or its conjugate when `conjugated`.
ScalarField wirtinger(const ScalarField& f, int j, bool conjugated);

/// d^2/(dz_i dzbar_j) on a complex grid.
ScalarField dzdzbar(const ScalarField& f, int i, int j);

/// Sum of pure second derivatives; the standard (2d+1)-point Laplacian inside.
ScalarField laplacian(const ScalarField& f);

/// All first derivatives along the real axes.
std::vector<ScalarField> gradient(const ScalarField& f);

/// Hessian along the real axes, stored row-major as dims*dims fields.
std::vector<ScalarField> hessian(const ScalarField& f);

}  // namespace s2hess
