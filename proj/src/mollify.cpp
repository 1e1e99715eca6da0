#include "s2hess/mollify.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

namespace s2hess {

struct Mollifier::Plan {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::size_t> to_padded;
  ~Plan() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
    require(data != nullptr, ErrorCode::invalid_argument, "mollify: out of memory");
    std::memset(data, 0, sizeof(fftw_complex) * n);
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  cplx* c() { return reinterpret_cast<cplx*>(data); }
  fftw_complex* data;
  std::size_t size;
};

}  // namespace

Mollifier::Mollifier(const Grid& grid, double scale) : grid_(grid), scale_(scale) {
  const double h = grid.spacing();
  require(scale >= 2.0 * h * (1.0 - 1e-12), ErrorCode::under_resolved_mollifier,
          "mollify: scale " + std::to_string(scale) + " is below two grid cells (" +
              std::to_string(2.0 * h) + ")");
  require(scale < 0.25, ErrorCode::invalid_argument, "mollify: scale must be below 0.25");

  const int d = grid.dims();
  const int N = grid.points();
  radius_ = static_cast<int>(std::floor(scale / h));
  padded_.assign(d, N + radius_);
  padded_size_ = 1;
  for (int p : padded_) padded_size_ *= static_cast<std::size_t>(p);

  std::vector<std::size_t> pstride(d, 1);
  for (int a = d - 2; a >= 0; --a) pstride[a] = pstride[a + 1] * padded_[a + 1];

  plan_ = std::make_shared<Plan>();
  plan_->to_padded.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t p = 0;
    for (int a = 0; a < d; ++a) p += pstride[a] * grid.coord(i, a);
    plan_->to_padded[i] = p;
  }

  // Kernel weights on the offset cube, wrapped into the padded array.
  FftwBuffer kbuf(padded_size_);
  const int width = 2 * radius_ + 1;
  std::size_t cube = 1;
  for (int a = 0; a < d; ++a) cube *= width;
  double total = 0.0;
  std::vector<int> off(d);
  for (std::size_t c = 0; c < cube; ++c) {
    std::size_t rem = c;
    double r2 = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      off[a] = static_cast<int>(rem % width) - radius_;
      rem /= width;
      const double x = off[a] * h / scale;
      r2 += x * x;
    }
    if (r2 >= 1.0) continue;
    const double w = std::exp(-1.0 / (1.0 - r2));
    std::size_t p = 0;
    for (int a = 0; a < d; ++a) {
      const int wrapped = off[a] < 0 ? off[a] + padded_[a] : off[a];
      p += pstride[a] * wrapped;
    }
    kbuf.c()[p] += w;
    total += w;
  }
  mass_ = 0.0;
  for (std::size_t i = 0; i < padded_size_; ++i) {
    kbuf.c()[i] /= total;
    mass_ += kbuf.c()[i].real();
  }

  std::vector<int> dims(padded_.begin(), padded_.end());
  plan_->forward = fftw_plan_dft(d, dims.data(), kbuf.data, kbuf.data, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_->backward = fftw_plan_dft(d, dims.data(), kbuf.data, kbuf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  require(plan_->forward && plan_->backward, ErrorCode::invalid_argument, "mollify: FFT planning failed");
  fftw_execute_dft(plan_->forward, kbuf.data, kbuf.data);
  kernel_hat_.assign(kbuf.c(), kbuf.c() + padded_size_);

  std::vector<cplx> ones(grid.size(), cplx(1.0, 0.0));
  const std::vector<cplx> m = convolve(ones);
  inside_mass_.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) inside_mass_[i] = m[i].real();
}

std::vector<cplx> Mollifier::convolve(const std::vector<cplx>& values) const {
  FftwBuffer buf(padded_size_);
  const auto& map = plan_->to_padded;
  for (std::size_t i = 0; i < values.size(); ++i) buf.c()[map[i]] = values[i];
  fftw_execute_dft(plan_->forward, buf.data, buf.data);
  for (std::size_t i = 0; i < padded_size_; ++i) buf.c()[i] *= kernel_hat_[i];
  fftw_execute_dft(plan_->backward, buf.data, buf.data);
  const double inv = 1.0 / static_cast<double>(padded_size_);
  std::vector<cplx> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = buf.c()[map[i]] * inv;
  return out;
}

ScalarField Mollifier::apply(const ScalarField& f) const {
  require(f.grid().same_shape(grid_), ErrorCode::invalid_argument, "mollify: grid mismatch");
  std::vector<cplx> out = convolve(f.values());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= inside_mass_[i];
  if (f.real_flag())
    for (auto& v : out) v = v.real();
  return ScalarField(f.grid(), std::move(out));
}

VectorField Mollifier::apply(const VectorField& f) const {
  std::vector<ScalarField> comps;
  comps.reserve(f.components());
  for (int i = 0; i < f.components(); ++i) comps.push_back(apply(f[i]));
  return VectorField(std::move(comps));
}

MatrixField Mollifier::apply(const MatrixField& m) const {
  MatrixField out(m.grid(), m.order(), m.symmetry());
  const bool mirrored = m.symmetry() != Symmetry::none;
  for (int i = 0; i < m.order(); ++i) {
    for (int j = mirrored ? i : 0; j < m.order(); ++j) {
      out(i, j) = apply(m(i, j));
      if (mirrored && i == j)
        for (auto& v : out(i, i).values()) v = v.real();
      if (mirrored && i != j)
        out(j, i) = m.symmetry() == Symmetry::hermitian ? out(i, j).conj() : out(i, j);
    }
  }
  return out;
}

ScalarField mollify(const ScalarField& f, double scale) { return Mollifier(f.grid(), scale).apply(f); }

MatrixField mollify(const MatrixField& m, double scale) { return Mollifier(m.grid(), scale).apply(m); }

}  // namespace s2hess
