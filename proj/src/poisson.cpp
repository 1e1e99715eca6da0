#include "s2hess/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "s2hess/norms.hpp"

namespace s2hess {
namespace {

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : data(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {
    require(data != nullptr, ErrorCode::invalid_argument, "poisson: out of memory");
  }
  ~RealBuffer() { fftw_free(data); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* data;
};

}  // namespace

ScalarField solve_dirichlet(const ScalarField& rhs, double laplacian_scale) {
  const Grid& g = rhs.grid();
  const int d = g.dims();
  require(d <= 6, ErrorCode::dimension_unsupported, "poisson: at most six axes are supported");
  require(laplacian_scale != 0.0 && std::isfinite(laplacian_scale), ErrorCode::invalid_argument,
          "poisson: laplacian scale must be finite and nonzero");

  const int m = g.points() - 2;  // interior nodes per axis
  std::size_t inner = 1;
  for (int a = 0; a < d; ++a) inner *= static_cast<std::size_t>(m);

  std::vector<std::size_t> istride(d, 1);
  for (int a = d - 2; a >= 0; --a) istride[a] = istride[a + 1] * m;
  std::vector<std::size_t> to_full(inner);
  for (std::size_t k = 0; k < inner; ++k) {
    std::size_t f = 0;
    for (int a = 0; a < d; ++a) f += g.stride(a) * (1 + (k / istride[a]) % m);
    to_full[k] = f;
  }

  const double h = g.spacing();
  std::vector<double> eig1(m);
  for (int k = 0; k < m; ++k)
    eig1[k] = (2.0 * std::cos(std::numbers::pi * (k + 1) / (g.points() - 1)) - 2.0) / (h * h);
  double norm = laplacian_scale;
  for (int a = 0; a < d; ++a) norm *= 2.0 * (g.points() - 1);

  RealBuffer buf(inner);
  std::vector<int> dims(d, m);
  std::vector<fftw_r2r_kind> kinds(d, FFTW_RODFT00);
  fftw_plan plan = fftw_plan_r2r(d, dims.data(), buf.data, buf.data, kinds.data(), FFTW_ESTIMATE);
  require(plan != nullptr, ErrorCode::invalid_argument, "poisson: FFT planning failed");
  std::unique_ptr<std::remove_pointer_t<fftw_plan>, decltype(&fftw_destroy_plan)> guard(plan, fftw_destroy_plan);

  ScalarField out(g);
  const bool has_imag = !rhs.real_flag();
  for (int part = 0; part < (has_imag ? 2 : 1); ++part) {
    for (std::size_t k = 0; k < inner; ++k) {
      const cplx v = rhs[to_full[k]];
      buf.data[k] = part == 0 ? v.real() : v.imag();
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < inner; ++k) {
      double lam = 0.0;
      for (int a = 0; a < d; ++a) lam += eig1[(k / istride[a]) % m];
      buf.data[k] /= lam * norm;
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < inner; ++k) {
      if (part == 0) out[to_full[k]] = buf.data[k];
      else out[to_full[k]] += cplx(0.0, buf.data[k]);
    }
  }
  return out;
}

double schauder_ratio(const ScalarField& psi, const ScalarField& rhs, double alpha) {
  const NormReport r = estimate_norm(rhs, 0, alpha);
  require(r.holder_norm() > 0.0, ErrorCode::undefined_ratio, "schauder_ratio: right-hand side vanishes");
  return estimate_norm(psi, 2, alpha).holder_norm() / r.holder_norm();
}

}  // namespace s2hess
