#pragma once

#include <memory>
#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

/// Discrete convolution with the bump exp(-1/(1-|x/l|^2)) supported in |x| < l.
///
/// The kernel is normalized to unit mass; near the boundary the truncated
/// kernel is renormalized by the mass that remains inside the grid, so
/// constants are reproduced everywhere. Convolutions are computed with a
/// zero-padded FFT, and the object caches the transformed kernel so one
/// instance can smooth many fields at the same scale.
class Mollifier {
 public:
  Mollifier(const Grid& grid, double scale);

  double scale() const noexcept { return scale_; }
  int radius_cells() const noexcept { return radius_; }
  /// Sum of the normalized discrete kernel weights.
  double kernel_mass() const noexcept { return mass_; }

  ScalarField apply(const ScalarField& f) const;
  VectorField apply(const VectorField& f) const;
  MatrixField apply(const MatrixField& m) const;

 private:
  struct Plan;
  Grid grid_;
  double scale_;
  int radius_;
  double mass_;
  std::vector<int> padded_;
  std::size_t padded_size_ = 0;
  std::vector<cplx> kernel_hat_;
  std::vector<double> inside_mass_;
  std::shared_ptr<Plan> plan_;

  std::vector<cplx> convolve(const std::vector<cplx>& values) const;
};

ScalarField mollify(const ScalarField& f, double scale);
MatrixField mollify(const MatrixField& m, double scale);

}  // namespace s2hess
