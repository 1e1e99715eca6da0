#pragma once

#include "s2hess/field.hpp"
#include "s2hess/jet.hpp"

namespace s2hess {

enum class Profile { gamma1, gamma2 };

/// Closed-form partial derivatives of
///   gamma1(s, t) = (s / pi) sin(2 pi t),
///   gamma2(s, t) = -(s^2 / (4 pi)) sin(4 pi t),
/// with at most one s-derivative and three t-derivatives.
double profile_eval(Profile which, int s_order, int t_order, double s, double t);

/// Phase frequency of direction j: t = omega * x_j with omega = mu (real) or
/// 2 mu (complex, where (z + zbar) . e_j = 2 Re z_j).
double phase_frequency(double mu, Ambient mode);

struct PerturbedPair {
  ScalarJet v;
  VectorJet w;
};

/// One corrugation step in direction j (0-based):
///   v' = v + gamma1(d, t) / mu,
///   w' = w - gamma1(d, t) / mu * G + gamma2(d, t) / mu * e_j,
/// where G = grad v (real) or dbar v (complex). The profile factors are
/// differentiated in closed form; only the amplitude d is differentiated
/// on the grid.
PerturbedPair perturb_direction(const ScalarJet& v, const VectorJet& w, const ScalarField& amplitude,
                                double mu, int j, Ambient mode);

/// 1/2 dv (x) dbar v + herm dw from the carried derivatives.
MatrixField quadratic_part(const ScalarJet& v, const VectorJet& w, Ambient mode);

/// Q(v', w') - Q(v, w) - d^2 e_j (x) e_j with Q = quadratic_part.
MatrixField perturbation_error(const ScalarJet& v, const VectorJet& w, const ScalarJet& v_next,
                               const VectorJet& w_next, const ScalarField& amplitude, int j, Ambient mode);

}  // namespace s2hess
