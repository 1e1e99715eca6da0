#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

/// Smooth bump exp(1 - 1/(1 - |x-c|^2/R^2)) with closed-form derivatives.
struct TestFunction {
  std::vector<double> center;
  double radius = 0.1;

  double value(std::span<const double> x) const;
  /// Value, gradient and row-major Hessian at x (all zero outside the support).
  double derivatives(std::span<const double> x, std::vector<double>& grad, std::vector<double>& hess) const;
  /// Support strictly inside the grid's interior sub-box.
  bool fits(const Grid& grid) const;
  /// Riemann-sum L2 norm on the grid.
  double l2_norm(const Grid& grid) const;
};

using Battery = std::vector<TestFunction>;

/// Deterministic battery: radii alternate 0.1/0.2, centres drawn from a
/// 1/32 lattice inside the interior sub-box with a fixed seed.
Battery make_battery(const Grid& grid, int count = 10, std::uint64_t seed = 20240611);

/// Per-test-function pairing values and relative residuals.
struct WeakResidualReport {
  std::vector<double> pairings;  // operator side
  std::vector<double> rhs;       // integral of f * phi
  std::vector<double> residuals; // relative, >= 0
  double max_residual = 0.0;
  double rms_residual = 0.0;
};

/// sigma_2 of the discrete real or complex Hessian.
ScalarField classical_s2(const ScalarField& u, Ambient mode);

/// Real: sum_i Delta_i A_ii - 2 sum_{i<j} d_ij A_ij, with Delta_i omitting axis i.
/// Complex: sum_i Delta_i A_ii - sum_{i!=j} d_{z_i} d_{zbar_j} A_ij.
ScalarField trace_curlcurl_strong(const MatrixField& a);

/// The same operator moved onto phi and integrated by a Riemann sum.
cplx weak_pairing(const MatrixField& a, const TestFunction& phi);

/// d v (x) dbar v built from the real-axis gradient of a real function v.
/// Complex entries are conj(d_{z_i} v) * d_{z_j} v.
MatrixField rank_one(std::span<const ScalarField> grad, Ambient mode);

/// herm dw (complex) or sym grad w (real) from finite differences of w.
MatrixField herm_grad(const VectorField& w, Ambient mode);
/// The same from a Jacobian along the real axes: jac[i][a] = d w_i / d axis a.
MatrixField herm_from_jacobian(const std::vector<std::vector<ScalarField>>& jac, Ambient mode);

/// -1/2 pairing of the rank-one matrix built from `grad` against the battery,
/// compared with the integral of f * phi.
WeakResidualReport very_weak_s2(std::span<const ScalarField> grad, const ScalarField& f,
                                const Battery& battery, Ambient mode);

/// max over the battery of |weak_pairing(K, phi)| / (||K||_0 * ||phi||_L2).
double kernel_residual(const MatrixField& k, const Battery& battery);

/// Pairings of dd^c(du ^ d^c u) ^ omega^(n-2) against the battery next to
/// the very weak pairings of the same u.
struct DdcComparison {
  std::vector<double> ddc_pairings;
  std::vector<double> very_weak_pairings;
  double discrepancy = 0.0;  // max absolute difference
  double ddc_residual = 0.0; // max relative residual against f
};

DdcComparison ddc_compare(const ScalarField& u, const ScalarField& f, const Battery& battery);
double ddc_pairing_residual(const ScalarField& u, const ScalarField& f, const Battery& battery);

}  // namespace s2hess
