#pragma once

#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

/// One potential per unordered pair i < j. In complex mode the potential of
/// the pair (j, i) is the conjugate of the stored one.
struct PotentialSet {
  Ambient mode = Ambient::real;
  int n = 0;
  std::vector<ScalarField> pairs;  // ordered (0,1), (0,2), ..., (1,2), ...

  static int pair_index(int n, int i, int j);
  const ScalarField& at(int i, int j) const { return pairs.at(pair_index(n, i, j)); }
};

/// Weak-kernel matrix field built from the potentials.
///
/// Off-diagonal entries are the real Laplacian of the pair potential (the
/// conjugate one below the diagonal in complex mode). Every diagonal entry
/// equals (2/(n-1)) sum_{i<j} d_ij psi_ij in real mode and
/// (4/(n-1)) sum_{i!=j} d_{z_i} d_{zbar_j} psi_ij in complex mode.
MatrixField build_kernel_from_potentials(const PotentialSet& potentials);

struct DiagonalizeOptions {
  double alpha = 0.5;
  double sigma_tilde = 0.1;
  /// Also record Schauder ratios of the potentials (costly on 4-D grids).
  bool record_schauder = true;
};

struct DiagonalizationResult {
  MatrixField kernel;
  std::vector<ScalarField> amplitudes;  // d_1..d_n, real and positive
  PotentialSet potentials;
  double input_distance = 0.0;          // ||H - Id||_alpha
  double amplitude_ratio = 0.0;         // max_j ||d_j - 1||_alpha / distance
  double kernel_ratio = 0.0;            // ||K||_alpha / distance
  double min_amplitude = 0.0;
  std::vector<double> schauder_ratios;  // per potential, NaN when undefined
};

/// Finds K in the weak kernel and d_j > 0 with H + K = diag(d_1^2, ..., d_n^2).
DiagonalizationResult diagonalize(const MatrixField& h, const DiagonalizeOptions& options = {});

}  // namespace s2hess
