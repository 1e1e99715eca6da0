#include "s2hess/corrugation.hpp"

#include <cmath>
#include <numbers>

#include "s2hess/operators.hpp"
#include "s2hess/stencil.hpp"

namespace s2hess {

namespace {
constexpr double kPi = std::numbers::pi;

// k-th t-derivative of sin(w t), i.e. w^k sin(w t + k pi/2).
double dsin(double w, int k, double t) { return std::pow(w, k) * std::sin(w * t + k * 0.5 * kPi); }
}  // namespace

double profile_eval(Profile which, int s_order, int t_order, double s, double t) {
  require(s_order >= 0 && s_order <= 1 && t_order >= 0 && t_order <= 3, ErrorCode::unsupported_order,
          "profile_eval: at most one s-derivative and three t-derivatives");
  if (which == Profile::gamma1) {
    const double amp = s_order == 0 ? s / kPi : 1.0 / kPi;
    return amp * dsin(2.0 * kPi, t_order, t);
  }
  const double amp = s_order == 0 ? -s * s / (4.0 * kPi) : -2.0 * s / (4.0 * kPi);
  return amp * dsin(4.0 * kPi, t_order, t);
}

double phase_frequency(double mu, Ambient mode) { return mode == Ambient::complex ? 2.0 * mu : mu; }

PerturbedPair perturb_direction(const ScalarJet& v, const VectorJet& w, const ScalarField& amplitude,
                                double mu, int j, Ambient mode) {
  const Grid& g = v.grid();
  require(g.kind() == mode, ErrorCode::wrong_ambient, "perturb_direction: mode does not match the grid");
  require(j >= 0 && j < g.n(), ErrorCode::invalid_argument, "perturb_direction: direction out of range");
  require(w.components() == g.n(), ErrorCode::invalid_argument, "perturb_direction: w needs n components");
  require(mu > 0.0 && std::isfinite(mu), ErrorCode::invalid_argument, "perturb_direction: frequency must be positive");
  for (std::size_t p = 0; p < amplitude.size(); ++p)
    require(amplitude[p].real() > 0.0, ErrorCode::invalid_argument,
            "perturb_direction: amplitude must be positive everywhere");

  const int d = g.dims();
  const int n = g.n();
  const int axis = g.x_axis(j);
  const double omega = phase_frequency(mu, mode);
  const double h = g.spacing();
  const auto dgrad = gradient(amplitude);
  const auto dhess = hessian(amplitude);

  PerturbedPair out{v, w};
  std::vector<double> de(d), dde(static_cast<std::size_t>(d) * d);
  std::vector<cplx> G(n), dG(static_cast<std::size_t>(n) * d);

  for (std::size_t p = 0; p < g.size(); ++p) {
    const double s = amplitude[p].real();
    const double t = omega * g.coord(p, axis) * h;
    const double g1 = profile_eval(Profile::gamma1, 0, 0, s, t);
    const double g1s = profile_eval(Profile::gamma1, 1, 0, s, t);
    const double g1t = profile_eval(Profile::gamma1, 0, 1, s, t);
    const double g1tt = profile_eval(Profile::gamma1, 0, 2, s, t);
    const double g1st = profile_eval(Profile::gamma1, 1, 1, s, t);
    const double g2 = profile_eval(Profile::gamma2, 0, 0, s, t);
    const double g2s = profile_eval(Profile::gamma2, 1, 0, s, t);
    const double g2t = profile_eval(Profile::gamma2, 0, 1, s, t);

    const double eps = g1 / mu;
    for (int a = 0; a < d; ++a) {
      const double da = dgrad[a][p].real();
      de[a] = (g1s * da + (a == axis ? g1t * omega : 0.0)) / mu;
    }
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        double val = g1s * dhess[a * d + b][p].real();
        if (b == axis) val += g1st * omega * dgrad[a][p].real();
        if (a == axis) val += g1st * omega * dgrad[b][p].real();
        if (a == axis && b == axis) val += g1tt * omega * omega;
        dde[a * d + b] = dde[b * d + a] = val / mu;
      }

    // G and its derivatives come from the incoming v.
    for (int i = 0; i < n; ++i) {
      if (mode == Ambient::real) {
        G[i] = v.grad[i][p];
        for (int a = 0; a < d; ++a) dG[i * d + a] = v.hess_at(i, a)[p];
      } else {
        const int xi = g.x_axis(i), yi = g.y_axis(i);
        G[i] = 0.5 * (v.grad[xi][p] + cplx(0.0, 1.0) * v.grad[yi][p]);
        for (int a = 0; a < d; ++a) dG[i * d + a] = 0.5 * (v.hess_at(xi, a)[p] + cplx(0.0, 1.0) * v.hess_at(yi, a)[p]);
      }
    }

    out.v.value[p] += eps;
    for (int a = 0; a < d; ++a) {
      out.v.grad[a][p] += de[a];
      for (int b = 0; b < d; ++b) out.v.hess[a * d + b][p] += dde[a * d + b];
    }
    for (int i = 0; i < n; ++i) {
      out.w.value[i][p] -= eps * G[i];
      if (i == j) out.w.value[i][p] += g2 / mu;
      for (int a = 0; a < d; ++a) {
        cplx dw = -de[a] * G[i] - eps * dG[i * d + a];
        if (i == j) dw += (g2s * dgrad[a][p].real() + (a == axis ? g2t * omega : 0.0)) / mu;
        out.w.jac[i][a][p] += dw;
      }
    }
  }
  return out;
}

MatrixField quadratic_part(const ScalarJet& v, const VectorJet& w, Ambient mode) {
  MatrixField q = rank_one(v.grad, mode);
  q *= 0.5;
  q += herm_from_jacobian(w.jac, mode);
  return q;
}

MatrixField perturbation_error(const ScalarJet& v, const VectorJet& w, const ScalarJet& v_next,
                               const VectorJet& w_next, const ScalarField& amplitude, int j, Ambient mode) {
  MatrixField e = quadratic_part(v_next, w_next, mode);
  e -= quadratic_part(v, w, mode);
  ScalarField sq = amplitude * amplitude;
  e(j, j) -= sq.real_part();
  return e;
}

}  // namespace s2hess
