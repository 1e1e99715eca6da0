#include "s2hess/diagonal.hpp"

#include <cmath>
#include <limits>

#include "s2hess/norms.hpp"
#include "s2hess/poisson.hpp"
#include "s2hess/stencil.hpp"

namespace s2hess {

int PotentialSet::pair_index(int n, int i, int j) {
  require(i >= 0 && i < j && j < n, ErrorCode::invalid_argument, "potential pair must satisfy i < j < n");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

MatrixField build_kernel_from_potentials(const PotentialSet& potentials) {
  const int n = potentials.n;
  require(n >= 2, ErrorCode::invalid_argument, "kernel construction needs n >= 2");
  require(static_cast<int>(potentials.pairs.size()) == n * (n - 1) / 2, ErrorCode::invalid_argument,
          "kernel construction: missing pair potentials");
  const Grid& g = potentials.pairs.front().grid();
  require(g.kind() == potentials.mode && g.n() == n, ErrorCode::wrong_ambient,
          "kernel construction: potentials live on the wrong grid");

  MatrixField k(g, n, natural_symmetry(potentials.mode));
  ScalarField diag(g);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const ScalarField& psi = potentials.at(i, j);
      k(i, j) = laplacian(psi);
      if (potentials.mode == Ambient::real) {
        k(j, i) = k(i, j);
        diag += derivative(psi, i, j);
      } else {
        k(j, i) = k(i, j).conj();
        // The (j, i) term of the sum is the conjugate of the (i, j) term.
        const ScalarField t = dzdzbar(psi, i, j);
        diag += t;
        diag += t.conj();
      }
    }
  }
  diag *= (potentials.mode == Ambient::real ? 2.0 : 4.0) / (n - 1);
  diag = diag.real_part();
  for (int i = 0; i < n; ++i) k(i, i) = diag;
  return k;
}

DiagonalizationResult diagonalize(const MatrixField& h, const DiagonalizeOptions& options) {
  const Grid& g = h.grid();
  const int n = g.n();
  const Ambient mode = g.kind();
  require(h.order() == n, ErrorCode::invalid_argument, "diagonalize: matrix order must equal n");
  require(h.symmetry() == natural_symmetry(mode), ErrorCode::invalid_argument,
          "diagonalize: symmetry class does not match the grid");
  require(n >= 2, ErrorCode::invalid_argument, "diagonalize: n must be at least 2");

  MatrixField offset = h;
  offset.add_identity(-1.0);
  const double distance = estimate_norm(offset, 0, options.alpha).holder_norm();
  require(distance <= options.sigma_tilde, ErrorCode::too_far_from_identity,
          "diagonalize: ||H - Id||_alpha = " + std::to_string(distance) + " exceeds " +
              std::to_string(options.sigma_tilde));

  DiagonalizationResult res{MatrixField(g, n, natural_symmetry(mode)), {}, {}, distance, 0.0, 0.0, 0.0, {}};
  res.potentials.mode = mode;
  res.potentials.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      ScalarField rhs = h(i, j);
      rhs *= -1.0;
      ScalarField psi = solve_dirichlet(rhs, 1.0);
      if (options.record_schauder) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        res.schauder_ratios.push_back(rhs.interior_max_abs() > 0.0 ? schauder_ratio(psi, rhs, options.alpha) : nan);
      }
      res.potentials.pairs.push_back(std::move(psi));
    }
  }
  res.kernel = build_kernel_from_potentials(res.potentials);

  // The potentials reproduce -H_ij exactly inside; the boundary ring, where
  // the Laplacian stencil is one-sided, takes the target value directly.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ScalarField& e = res.kernel(i, j);
      for (std::size_t p = 0; p < g.size(); ++p)
        if (g.on_boundary(p)) e[p] = -h(i, j)[p];
    }

  res.min_amplitude = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    ScalarField d(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double sq = (h(j, j)[p] + res.kernel(j, j)[p]).real();
      require(sq > 0.0, ErrorCode::diagonalization_failed,
              "diagonalize: diagonal entry " + std::to_string(j + 1) + " of H + K is not positive");
      d[p] = std::sqrt(sq);
      res.min_amplitude = std::min(res.min_amplitude, d[p].real());
    }
    res.amplitudes.push_back(std::move(d));
  }

  if (distance > 0.0) {
    for (const auto& d : res.amplitudes) {
      ScalarField dm = d;
      dm += -1.0;
      res.amplitude_ratio = std::max(res.amplitude_ratio, estimate_norm(dm, 0, options.alpha).holder_norm() / distance);
    }
    res.kernel_ratio = estimate_norm(res.kernel, 0, options.alpha).holder_norm() / distance;
  }
  return res;
}

}  // namespace s2hess
