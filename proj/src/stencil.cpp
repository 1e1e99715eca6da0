#include "s2hess/stencil.hpp"

#include <numeric>

namespace s2hess {
namespace {

void first_along(const Grid& g, const std::vector<cplx>& in, std::vector<cplx>& out, int axis) {
  const std::size_t s = g.stride(axis);
  const int last = g.points() - 1;
  const double inv2h = 0.5 / g.spacing();
  const std::size_t block = s * static_cast<std::size_t>(g.points());
  for (std::size_t outer = 0; outer < g.size(); outer += block) {
    const cplx* src = in.data() + outer;
    cplx* dst = out.data() + outer;
    for (std::size_t j = 0; j < s; ++j) {
      dst[j] = (-3.0 * src[j] + 4.0 * src[j + s] - src[j + 2 * s]) * inv2h;
      const std::size_t e = last * s + j;
      dst[e] = (3.0 * src[e] - 4.0 * src[e - s] + src[e - 2 * s]) * inv2h;
    }
    for (int c = 1; c < last; ++c) {
      const std::size_t row = c * s;
      for (std::size_t j = 0; j < s; ++j) dst[row + j] = (src[row + s + j] - src[row - s + j]) * inv2h;
    }
  }
}

void second_along(const Grid& g, const std::vector<cplx>& in, std::vector<cplx>& out, int axis) {
  const std::size_t s = g.stride(axis);
  const int last = g.points() - 1;
  const double invh2 = 1.0 / (g.spacing() * g.spacing());
  const std::size_t block = s * static_cast<std::size_t>(g.points());
  for (std::size_t outer = 0; outer < g.size(); outer += block) {
    const cplx* src = in.data() + outer;
    cplx* dst = out.data() + outer;
    for (std::size_t j = 0; j < s; ++j) {
      dst[j] = (2.0 * src[j] - 5.0 * src[j + s] + 4.0 * src[j + 2 * s] - src[j + 3 * s]) * invh2;
      const std::size_t e = last * s + j;
      dst[e] = (2.0 * src[e] - 5.0 * src[e - s] + 4.0 * src[e - 2 * s] - src[e - 3 * s]) * invh2;
    }
    for (int c = 1; c < last; ++c) {
      const std::size_t row = c * s;
      for (std::size_t j = 0; j < s; ++j)
        dst[row + j] = (src[row + s + j] - 2.0 * src[row + j] + src[row - s + j]) * invh2;
    }
  }
}

}  // namespace

ScalarField derivative(const ScalarField& f, std::span<const int> orders) {
  const Grid& g = f.grid();
  require(static_cast<int>(orders.size()) == g.dims(), ErrorCode::invalid_argument,
          "derivative: multi-index length must equal the number of axes");
  int total = 0;
  for (int k : orders) {
    require(k >= 0, ErrorCode::invalid_argument, "derivative: negative order");
    total += k;
  }
  require(total <= 4, ErrorCode::unsupported_order, "derivative: total order exceeds 4");

  // The first sweep reads straight from f; later sweeps ping-pong.
  std::vector<cplx> cur, tmp;
  const std::vector<cplx>* src = &f.values();
  auto sweep = [&](auto&& op, int axis) {
    tmp.resize(f.size());
    op(g, *src, tmp, axis);
    cur.swap(tmp);
    src = &cur;
  };
  for (int a = 0; a < g.dims(); ++a) {
    int k = orders[a];
    for (; k >= 2; k -= 2) sweep(second_along, a);
    if (k == 1) sweep(first_along, a);
  }
  if (src == &f.values()) return f;
  return ScalarField(g, std::move(cur));
}

ScalarField derivative(const ScalarField& f, int axis) {
  std::vector<int> o(f.grid().dims(), 0);
  o.at(axis) = 1;
  return derivative(f, o);
}

ScalarField derivative(const ScalarField& f, int axis_a, int axis_b) {
  std::vector<int> o(f.grid().dims(), 0);
  o.at(axis_a) += 1;
  o.at(axis_b) += 1;
  return derivative(f, o);
}

ScalarField wirtinger(const ScalarField& f, int j, bool conjugated) {
  const Grid& g = f.grid();
  require(g.kind() == Ambient::complex, ErrorCode::wrong_ambient,
          "wirtinger derivative needs a complex grid");
  require(j >= 0 && j < g.n(), ErrorCode::invalid_argument, "wirtinger: index out of range");
  ScalarField dx = derivative(f, g.x_axis(j));
  ScalarField dy = derivative(f, g.y_axis(j));
  const cplx iy = conjugated ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
  dx *= 0.5;
  dx.axpy(iy, dy);
  return dx;
}

ScalarField dzdzbar(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid();
  require(g.kind() == Ambient::complex, ErrorCode::wrong_ambient, "dzdzbar needs a complex grid");
  require(i >= 0 && i < g.n() && j >= 0 && j < g.n(), ErrorCode::invalid_argument,
          "dzdzbar: index out of range");
  const int xi = g.x_axis(i), yi = g.y_axis(i), xj = g.x_axis(j), yj = g.y_axis(j);
  if (i == j) {
    // The mixed terms cancel; what remains is the 3-point Laplacian in the pair.
    ScalarField out = derivative(f, xi, xi);
    out += derivative(f, yi, yi);
    out *= 0.25;
    return out;
  }
  // 1/4 (D_xi - i D_yi)(D_xj + i D_yj) with central first differences.
  ScalarField inner = derivative(f, xj);
  inner.axpy(cplx(0.0, 1.0), derivative(f, yj));
  ScalarField out = derivative(inner, xi);
  out.axpy(cplx(0.0, -1.0), derivative(inner, yi));
  out *= 0.25;
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid());
  for (int a = 0; a < f.grid().dims(); ++a) out += derivative(f, a, a);
  return out;
}

std::vector<ScalarField> gradient(const ScalarField& f) {
  std::vector<ScalarField> g;
  g.reserve(f.grid().dims());
  for (int a = 0; a < f.grid().dims(); ++a) g.push_back(derivative(f, a));
  return g;
}

std::vector<ScalarField> hessian(const ScalarField& f) {
  const int d = f.grid().dims();
  std::vector<ScalarField> h(static_cast<std::size_t>(d) * d, ScalarField(f.grid()));
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      h[a * d + b] = derivative(f, a, b);
      if (b != a) h[b * d + a] = h[a * d + b];
    }
  }
  return h;
}

}  // namespace s2hess
