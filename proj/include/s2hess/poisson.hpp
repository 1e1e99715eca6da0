#pragma once

#include "s2hess/field.hpp"

namespace s2hess {

/// Solves scale * Delta_h psi = rhs at the interior nodes with psi = 0 on the
/// boundary, where Delta_h is the standard (2d+1)-point Laplacian. The
/// right-hand side is only read at interior nodes. Complex data is solved as
/// two real problems. Supports up to six axes.
ScalarField solve_dirichlet(const ScalarField& rhs, double laplacian_scale = 1.0);

/// ||psi||_{2;alpha} / ||rhs||_{0;alpha}, both measured with estimate_norm.
double schauder_ratio(const ScalarField& psi, const ScalarField& rhs, double alpha);

}  // namespace s2hess
