#include "s2hess/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "s2hess/stencil.hpp"

namespace s2hess {
namespace {

void require_mode(const Grid& g, Ambient mode) {
  require(g.kind() == mode, ErrorCode::wrong_ambient,
          std::string("operator mode ") + to_string(mode) + " does not match a " + to_string(g.kind()) + " grid");
}

// Visits every grid node inside the bounding box of phi's support, widened by
// `pad` cells on each side.
void for_support(const Grid& g, const TestFunction& phi,
                 const std::function<void(std::size_t, std::span<const double>)>& visit, int pad = 0) {
  const int d = g.dims();
  const double h = g.spacing();
  std::vector<int> lo(d), hi(d), idx(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::ceil((phi.center[a] - phi.radius) / h)) - pad);
    hi[a] = std::min(g.points() - 1, static_cast<int>(std::floor((phi.center[a] + phi.radius) / h)) + pad);
    if (hi[a] < lo[a]) return;
  }
  idx = lo;
  std::vector<double> x(d);
  while (true) {
    for (int a = 0; a < d; ++a) x[a] = idx[a] * h;
    visit(g.flatten(idx), x);
    int a = d - 1;
    while (a >= 0 && ++idx[a] > hi[a]) {
      idx[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

double cell_volume(const Grid& g) { return std::pow(g.spacing(), g.dims()); }

// Second differences of phi with the interior stencils of the strong operator
// (three-point along one axis, products of central first differences across
// axes), so that sum_x (D phi) A = sum_x phi (D A) holds exactly on the grid.
// Returns false when phi vanishes on the whole stencil.
bool stencil_hessian(const TestFunction& phi, std::span<const double> x, double h, std::vector<double>& hess) {
  const int d = static_cast<int>(x.size());
  hess.assign(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<double> y(x.begin(), x.end());
  auto at = [&](int a, int sa, int b, int sb) {
    y[a] += sa * h;
    y[b] += sb * h;
    const double v = phi.value(y);
    y[a] = x[a];
    y[b] = x[b];
    return v;
  };
  const double centre = phi.value(x);
  bool any = centre != 0.0;
  for (int a = 0; a < d; ++a) {
    const double p = at(a, 1, a, 0), m = at(a, -1, a, 0);
    any = any || p != 0.0 || m != 0.0;
    hess[a * d + a] = (p - 2.0 * centre + m) / (h * h);
    for (int b = a + 1; b < d; ++b) {
      const double v = (at(a, 1, b, 1) - at(a, 1, b, -1) - at(a, -1, b, 1) + at(a, -1, b, -1)) / (4.0 * h * h);
      any = any || v != 0.0;
      hess[a * d + b] = hess[b * d + a] = v;
    }
  }
  return any;
}

// Weight matrix W with pairing = sum_ij W_ij A_ij, from the real Hessian of phi.
void pairing_weights(const Grid& g, const std::vector<double>& hess, std::vector<cplx>& w) {
  const int n = g.n();
  const int d = g.dims();
  auto H = [&](int a, int b) { return hess[a * d + b]; };
  w.assign(static_cast<std::size_t>(n) * n, 0.0);
  if (g.kind() == Ambient::real) {
    double lap = 0.0;
    for (int a = 0; a < n; ++a) lap += H(a, a);
    for (int i = 0; i < n; ++i) {
      w[i * n + i] = lap - H(i, i);
      for (int j = i + 1; j < n; ++j) w[i * n + j] = -2.0 * H(i, j);
    }
    return;
  }
  std::vector<double> part(n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    part[j] = 0.25 * (H(g.x_axis(j), g.x_axis(j)) + H(g.y_axis(j), g.y_axis(j)));
    total += part[j];
  }
  for (int i = 0; i < n; ++i) {
    w[i * n + i] = total - part[i];
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int xi = g.x_axis(i), yi = g.y_axis(i), xj = g.x_axis(j), yj = g.y_axis(j);
      const cplx ddbar = 0.25 * cplx(H(xi, xj) + H(yi, yj), H(xi, yj) - H(yi, xj));
      w[i * n + j] = -ddbar;
    }
  }
}

double rhs_pairing(const ScalarField& f, const TestFunction& phi, double* abs_pairing, double* mass) {
  const Grid& g = f.grid();
  double s = 0.0, sa = 0.0, m = 0.0;
  for_support(g, phi, [&](std::size_t i, std::span<const double> x) {
    const double p = phi.value(x);
    s += f[i].real() * p;
    sa += std::abs(f[i]) * p;
    m += p;
  });
  const double vol = cell_volume(g);
  if (abs_pairing) *abs_pairing = sa * vol;
  if (mass) *mass = m * vol;
  return s * vol;
}

double normalizer(double abs_pairing, double mass) {
  return abs_pairing > 1e-14 * mass ? abs_pairing : mass;
}

void summarize(WeakResidualReport& r) {
  double sq = 0.0;
  r.max_residual = 0.0;
  for (double v : r.residuals) {
    r.max_residual = std::max(r.max_residual, v);
    sq += v * v;
  }
  r.rms_residual = r.residuals.empty() ? 0.0 : std::sqrt(sq / r.residuals.size());
}

// ---- exterior algebra on the basis dz_1..dz_n, dzbar_1..dzbar_n ----

using Form = std::map<unsigned, cplx>;

int wedge_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned bits = b; bits; bits &= bits - 1) {
    const unsigned k = static_cast<unsigned>(__builtin_ctz(bits));
    swaps += __builtin_popcount(a >> (k + 1));
  }
  return (swaps % 2) ? -1 : 1;
}

Form wedge(const Form& f, const Form& g) {
  Form out;
  for (const auto& [a, ca] : f)
    for (const auto& [b, cb] : g)
      if ((a & b) == 0) out[a | b] += static_cast<double>(wedge_sign(a, b)) * ca * cb;
  return out;
}

// Top-degree coefficient of e_A ^ e_B ^ omega^(n-2), relative to the volume form
// prod_j (i dz_j ^ dzbar_j); indexed by 2-form basis masks.
struct DdcTensor {
  std::vector<unsigned> two_forms;
  std::vector<cplx> coeff;  // two_forms.size()^2
};

DdcTensor ddc_tensor(int n) {
  const unsigned top = (1u << (2 * n)) - 1;
  Form omega;
  for (int j = 0; j < n; ++j) omega[(1u << j) | (1u << (n + j))] = cplx(0.0, 1.0);
  Form power{{0u, 1.0}};
  for (int k = 0; k < n - 2; ++k) power = wedge(power, omega);
  Form vol{{0u, 1.0}};
  for (int j = 0; j < n; ++j) vol = wedge(vol, Form{{(1u << j) | (1u << (n + j)), cplx(0.0, 1.0)}});
  const cplx vtop = vol[top];

  DdcTensor t;
  for (int p = 0; p < 2 * n; ++p)
    for (int q = p + 1; q < 2 * n; ++q) t.two_forms.push_back((1u << p) | (1u << q));
  const std::size_t m = t.two_forms.size();
  t.coeff.assign(m * m, 0.0);
  for (std::size_t A = 0; A < m; ++A) {
    for (std::size_t B = 0; B < m; ++B) {
      Form f = wedge(wedge(Form{{t.two_forms[A], 1.0}}, Form{{t.two_forms[B], 1.0}}), power);
      auto it = f.find(top);
      if (it != f.end()) t.coeff[A * m + B] = it->second / vtop;
    }
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------- TestFunction

double TestFunction::value(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t a = 0; a < center.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
  const double rho = r2 / (radius * radius);
  if (rho >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho));
}

double TestFunction::derivatives(std::span<const double> x, std::vector<double>& grad,
                                 std::vector<double>& hess) const {
  const std::size_t d = center.size();
  grad.assign(d, 0.0);
  hess.assign(d * d, 0.0);
  double r2 = 0.0;
  for (std::size_t a = 0; a < d; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
  const double R2 = radius * radius;
  const double rho = r2 / R2;
  if (rho >= 1.0) return 0.0;
  const double om = 1.0 - rho;
  const double g = std::exp(1.0 - 1.0 / om);
  const double g1 = -g / (om * om);
  const double g2 = g * (2.0 * rho - 1.0) / (om * om * om * om);
  for (std::size_t a = 0; a < d; ++a) {
    const double da = x[a] - center[a];
    grad[a] = g1 * 2.0 * da / R2;
    for (std::size_t b = 0; b < d; ++b) {
      const double db = x[b] - center[b];
      hess[a * d + b] = g2 * 4.0 * da * db / (R2 * R2) + (a == b ? g1 * 2.0 / R2 : 0.0);
    }
  }
  return g;
}

bool TestFunction::fits(const Grid& grid) const {
  if (static_cast<int>(center.size()) != grid.dims() || radius <= 0.0) return false;
  const double lo = grid.interior_lo(), hi = grid.interior_hi();
  for (double c : center)
    if (c - radius <= lo || c + radius >= hi) return false;
  return true;
}

double TestFunction::l2_norm(const Grid& grid) const {
  double s = 0.0;
  for_support(grid, *this, [&](std::size_t, std::span<const double> x) {
    const double v = value(x);
    s += v * v;
  });
  return std::sqrt(s * cell_volume(grid));
}

Battery make_battery(const Grid& grid, int count, std::uint64_t seed) {
  require(count >= 1, ErrorCode::empty_battery, "battery needs at least one test function");
  std::mt19937_64 rng(seed);
  Battery battery;
  const double lo = grid.interior_lo(), hi = grid.interior_hi();
  for (int k = 0; k < count; ++k) {
    TestFunction phi;
    phi.radius = (k % 2 == 0) ? 0.1 : 0.2;
    const int klo = static_cast<int>(std::floor((lo + phi.radius) * 32.0)) + 1;
    const int khi = static_cast<int>(std::ceil((hi - phi.radius) * 32.0)) - 1;
    require(khi >= klo, ErrorCode::support_violation,
            "battery: interior sub-box too small for radius " + std::to_string(phi.radius));
    std::uniform_int_distribution<int> pick(klo, khi);
    for (int a = 0; a < grid.dims(); ++a) phi.center.push_back(pick(rng) / 32.0);
    require(phi.fits(grid), ErrorCode::support_violation, "battery: test function leaves the interior");
    battery.push_back(std::move(phi));
  }
  return battery;
}

// ---------------------------------------------------------------- operators

ScalarField classical_s2(const ScalarField& u, Ambient mode) {
  const Grid& g = u.grid();
  require_mode(g, mode);
  const int n = g.n();
  ScalarField out(g);
  if (mode == Ambient::real) {
    const auto H = hessian(u);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        out += H[i * n + i] * H[j * n + j];
        out -= H[i * n + j] * H[i * n + j];
      }
    return out.real_part();
  }
  std::vector<ScalarField> H;
  H.reserve(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) H.push_back(dzdzbar(u, k, j));
  auto& o = out.values();
  for (int k = 0; k < n; ++k)
    for (int j = k + 1; j < n; ++j) {
      const auto &kk = H[k * n + k].values(), &jj = H[j * n + j].values();
      const auto &kj = H[k * n + j].values(), &jk = H[j * n + k].values();
      for (std::size_t q = 0; q < o.size(); ++q) o[q] += kk[q] * jj[q] - kj[q] * jk[q];
    }
  return out.real_part();
}

ScalarField trace_curlcurl_strong(const MatrixField& a) {
  const Grid& g = a.grid();
  require(a.symmetry() != Symmetry::none, ErrorCode::unsupported_order,
          "trace_curlcurl_strong: matrix field needs a symmetry class");
  require(a.order() == g.n(), ErrorCode::invalid_argument, "matrix order must equal n");
  const int n = g.n();
  ScalarField out(g);
  if (g.kind() == Ambient::real) {
    for (int i = 0; i < n; ++i) {
      for (int m = 0; m < n; ++m)
        if (m != i) out += derivative(a(i, i), m, m);
      for (int j = i + 1; j < n; ++j) out.axpy(-2.0, derivative(a(i, j), i, j));
    }
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m)
      if (m != i) out += dzdzbar(a(i, i), m, m);
    for (int j = 0; j < n; ++j)
      if (j != i) out -= dzdzbar(a(i, j), i, j);
  }
  return out;
}

cplx weak_pairing(const MatrixField& a, const TestFunction& phi) {
  const Grid& g = a.grid();
  require(phi.fits(g), ErrorCode::support_violation, "weak_pairing: test function support leaves the interior");
  require(a.order() == g.n(), ErrorCode::invalid_argument, "matrix order must equal n");
  const int n = g.n();
  std::vector<double> hess;
  std::vector<cplx> w;
  cplx sum = 0.0;
  for_support(
      g, phi,
      [&](std::size_t i, std::span<const double> x) {
        if (!stencil_hessian(phi, x, g.spacing(), hess)) return;
        pairing_weights(g, hess, w);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c)
            if (w[r * n + c] != 0.0) sum += w[r * n + c] * a(r, c)[i];
      },
      1);
  return sum * cell_volume(g);
}

MatrixField rank_one(std::span<const ScalarField> grad, Ambient mode) {
  require(!grad.empty(), ErrorCode::invalid_argument, "rank_one: empty gradient");
  const Grid& g = grad.front().grid();
  require_mode(g, mode);
  require(static_cast<int>(grad.size()) == g.dims(), ErrorCode::invalid_argument,
          "rank_one: gradient needs one component per axis");
  const int n = g.n();
  MatrixField r(g, n, natural_symmetry(mode));
  if (mode == Ambient::real) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        r(i, j) = grad[i] * grad[j];
        if (j != i) r(j, i) = r(i, j);
      }
    return r;
  }
  std::vector<ScalarField> dz;
  for (int j = 0; j < n; ++j) {
    ScalarField d = grad[g.x_axis(j)];
    d.axpy(cplx(0.0, -1.0), grad[g.y_axis(j)]);
    d *= 0.5;
    dz.push_back(std::move(d));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto &a = dz[i].values(), &b = dz[j].values();
      auto& up = r(i, j).values();
      if (j == i) {
        for (std::size_t q = 0; q < up.size(); ++q) up[q] = std::norm(a[q]);
        continue;
      }
      auto& low = r(j, i).values();
      for (std::size_t q = 0; q < up.size(); ++q) {
        up[q] = std::conj(a[q]) * b[q];
        low[q] = std::conj(up[q]);
      }
    }
  return r;
}

MatrixField herm_from_jacobian(const std::vector<std::vector<ScalarField>>& jac, Ambient mode) {
  require(!jac.empty() && !jac.front().empty(), ErrorCode::invalid_argument, "herm: empty Jacobian");
  const Grid& g = jac.front().front().grid();
  require_mode(g, mode);
  const int n = g.n();
  require(static_cast<int>(jac.size()) == n, ErrorCode::invalid_argument,
          "herm: the map needs n components");
  for (const auto& row : jac)
    require(static_cast<int>(row.size()) == g.dims(), ErrorCode::invalid_argument,
            "herm: Jacobian rows need one entry per axis");
  MatrixField m(g, n, natural_symmetry(mode));
  if (mode == Ambient::real) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        m(i, j) = jac[i][j] + jac[j][i];
        m(i, j) *= 0.5;
        if (j != i) m(j, i) = m(i, j);
      }
    return m;
  }
  auto dz = [&](int i, int k) {
    ScalarField d = jac[i][g.x_axis(k)];
    d.axpy(cplx(0.0, -1.0), jac[i][g.y_axis(k)]);
    d *= 0.5;
    return d;
  };
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      ScalarField e = dz(i, k) + dz(k, i).conj();
      e *= 0.5;
      if (k == i) e = e.real_part();
      m(i, k) = e;
      if (k != i) m(k, i) = e.conj();
    }
  return m;
}

MatrixField herm_grad(const VectorField& w, Ambient mode) {
  require(w.components() == w.grid().n(), ErrorCode::invalid_argument, "herm_grad: the map needs n components");
  const Grid& g = w.grid();
  require_mode(g, mode);
  if (mode == Ambient::real) {
    std::vector<std::vector<ScalarField>> jac;
    for (int i = 0; i < w.components(); ++i) jac.push_back(gradient(w[i]));
    return herm_from_jacobian(jac, mode);
  }
  // Complex columns are formed one at a time to keep a single Jacobian entry alive.
  const int n = g.n();
  auto dz = [&](int i, int k) {
    ScalarField d = derivative(w[i], g.x_axis(k));
    d.axpy(cplx(0.0, -1.0), derivative(w[i], g.y_axis(k)));
    return d;
  };
  MatrixField m(g, n, natural_symmetry(mode));
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      ScalarField e = dz(i, k);
      auto& ev = e.values();
      if (k == i) {
        for (auto& z : ev) z = 0.5 * z.real();
      } else {
        const ScalarField other = dz(k, i);
        const auto& ov = other.values();
        for (std::size_t q = 0; q < ev.size(); ++q) ev[q] = 0.25 * (ev[q] + std::conj(ov[q]));
        m(k, i) = e.conj();
      }
      m(i, k) = std::move(e);
    }
  return m;
}

WeakResidualReport very_weak_s2(std::span<const ScalarField> grad, const ScalarField& f,
                                const Battery& battery, Ambient mode) {
  require(!battery.empty(), ErrorCode::empty_battery, "very_weak_s2: empty test battery");
  const MatrixField r = rank_one(grad, mode);
  WeakResidualReport rep;
  for (const auto& phi : battery) {
    const double lhs = -0.5 * weak_pairing(r, phi).real();
    double abs_pair = 0.0, mass = 0.0;
    const double rhs = rhs_pairing(f, phi, &abs_pair, &mass);
    rep.pairings.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.residuals.push_back(std::abs(lhs - rhs) / normalizer(abs_pair, mass));
  }
  summarize(rep);
  return rep;
}

double kernel_residual(const MatrixField& k, const Battery& battery) {
  require(!battery.empty(), ErrorCode::empty_battery, "kernel_residual: empty test battery");
  const double scale = k.interior_max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& phi : battery)
    worst = std::max(worst, std::abs(weak_pairing(k, phi)) / (scale * phi.l2_norm(k.grid())));
  return worst;
}

DdcComparison ddc_compare(const ScalarField& u, const ScalarField& f, const Battery& battery) {
  const Grid& g = u.grid();
  require(g.kind() == Ambient::complex, ErrorCode::wrong_ambient, "ddc pairing needs a complex grid");
  const int n = g.n();
  require(n >= 2, ErrorCode::invalid_argument, "ddc pairing needs n >= 2");
  require(!battery.empty(), ErrorCode::empty_battery, "ddc pairing: empty test battery");

  const auto grad = gradient(u);
  const DdcTensor t = ddc_tensor(n);
  const std::size_t m = t.two_forms.size();
  double factorial = 1.0;
  for (int k = 2; k <= n - 2; ++k) factorial *= k;
  const double norm = -1.0 / (8.0 * factorial);

  // Real-axis coefficients of the Wirtinger derivative attached to basis index p.
  const int d = g.dims();
  std::vector<std::vector<cplx>> wirt(2 * n, std::vector<cplx>(d, 0.0));
  for (int j = 0; j < n; ++j) {
    wirt[j][g.x_axis(j)] = 0.5;
    wirt[j][g.y_axis(j)] = cplx(0.0, -0.5);
    wirt[n + j][g.x_axis(j)] = 0.5;
    wirt[n + j][g.y_axis(j)] = cplx(0.0, 0.5);
  }
  auto bit_pair = [](unsigned mask) {
    const int p = __builtin_ctz(mask);
    const int q = __builtin_ctz(mask & (mask - 1));
    return std::pair<int, int>{p, q};
  };

  DdcComparison cmp;
  const MatrixField r = rank_one(grad, Ambient::complex);
  std::vector<double> ph;
  std::vector<cplx> du(2 * n), dcu(2 * n), dcphi_d(2 * n * 2 * n), alpha(m), beta(m);
  for (const auto& phi : battery) {
    require(phi.fits(g), ErrorCode::support_violation, "ddc pairing: test function leaves the interior");
    cplx total = 0.0;
    for_support(g, phi, [&](std::size_t i, std::span<const double> x) {
      if (!stencil_hessian(phi, x, g.spacing(), ph)) return;
      // du and d^c u = i(dbar u - d u) in the complex basis.
      for (int p = 0; p < 2 * n; ++p) {
        cplx s = 0.0;
        for (int a = 0; a < d; ++a) s += wirt[p][a] * grad[a][i];
        du[p] = s;
        dcu[p] = (p < n ? cplx(0.0, -1.0) : cplx(0.0, 1.0)) * s;
      }
      // Second Wirtinger derivatives D_r D_p phi.
      for (int r2 = 0; r2 < 2 * n; ++r2)
        for (int p = 0; p < 2 * n; ++p) {
          cplx s = 0.0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) s += wirt[r2][a] * wirt[p][b] * ph[a * d + b];
          dcphi_d[r2 * 2 * n + p] = (p < n ? cplx(0.0, -1.0) : cplx(0.0, 1.0)) * s;
        }
      for (std::size_t A = 0; A < m; ++A) {
        const auto [p, q] = bit_pair(t.two_forms[A]);
        alpha[A] = du[p] * dcu[q] - du[q] * dcu[p];
        beta[A] = dcphi_d[p * 2 * n + q] - dcphi_d[q * 2 * n + p];
      }
      cplx rho = 0.0;
      for (std::size_t A = 0; A < m; ++A)
        for (std::size_t B = 0; B < m; ++B)
          if (t.coeff[A * m + B] != 0.0) rho += t.coeff[A * m + B] * alpha[A] * beta[B];
      total += rho;
    }, 1);
    const double ddc = norm * (total * cell_volume(g)).real();
    const double vw = -0.5 * weak_pairing(r, phi).real();
    double abs_pair = 0.0, mass = 0.0;
    const double rhs = rhs_pairing(f, phi, &abs_pair, &mass);
    cmp.ddc_pairings.push_back(ddc);
    cmp.very_weak_pairings.push_back(vw);
    cmp.discrepancy = std::max(cmp.discrepancy, std::abs(ddc - vw));
    cmp.ddc_residual = std::max(cmp.ddc_residual, std::abs(ddc - rhs) / normalizer(abs_pair, mass));
  }
  return cmp;
}

double ddc_pairing_residual(const ScalarField& u, const ScalarField& f, const Battery& battery) {
  return ddc_compare(u, f, battery).discrepancy;
}

}  // namespace s2hess
