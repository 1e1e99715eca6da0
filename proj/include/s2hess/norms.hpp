#pragma once

#include <cstddef>
#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

/// Measured C^k and Hoelder quantities of a field on the interior sub-box.
///
/// `sup[j]` is |u|_j, the largest sup-norm among the order-j partial
/// derivatives. `holder` is the sampled Hoelder seminorm of the order-k
/// derivatives. Every number is a lower bound of the continuum quantity.
struct NormReport {
  int order = 0;
  double alpha = 0.0;
  std::vector<double> sup;
  double holder = 0.0;
  std::size_t pair_count = 0;
  double region_lo = 0.0;
  double region_hi = 1.0;

  /// ||u||_k = sum of sup[j] for j <= k.
  double ck_norm() const noexcept;
  /// ||u||_{k;alpha} = ||u||_k + holder.
  double holder_norm() const noexcept;
};

NormReport estimate_norm(const ScalarField& f, int k, double alpha);
NormReport estimate_norm(const VectorField& f, int k, double alpha);
/// Entrywise measurement aggregated by the maximum over entries.
NormReport estimate_norm(const MatrixField& m, int k, double alpha);

/// Sampled Hoelder seminorm of the values themselves.
double holder_seminorm(const ScalarField& f, double alpha, std::size_t* pairs = nullptr);

/// ||f||_0^(1-alpha) * |f|_1^alpha.
double interpolate_norm_bound(const NormReport& report0, const NormReport& report1, double alpha);

/// Combine reports of several fields by the entrywise maximum.
NormReport max_report(const std::vector<NormReport>& parts);

}  // namespace s2hess
