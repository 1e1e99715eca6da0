#include <cmath>
#include <numbers>

#include "doctest.h"
#include "s2hess/operators.hpp"
#include "s2hess/stencil.hpp"
#include "support/oracles.hpp"

using namespace s2hess;

namespace {

double interior_err(const ScalarField& a, const ScalarField& b) { return (a - b).interior_max_abs(); }

ScalarField abs2_sum(const Grid& g) {
  return ScalarField::sample(g, [](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return s;
  });
}

TestFunction centered_bump(const Grid& g, double radius) {
  TestFunction phi;
  phi.center.assign(g.dims(), 0.5);
  phi.radius = radius;
  return phi;
}

// Riemann sum of field * phi.
cplx integrate_against(const ScalarField& f, const TestFunction& phi) {
  const Grid& g = f.grid();
  std::vector<double> x(g.dims());
  cplx s = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (int a = 0; a < g.dims(); ++a) x[a] = g.coord(p, a) * g.spacing();
    s += f[p] * phi.value(x);
  }
  return s * std::pow(g.spacing(), g.dims());
}

MatrixField random_symmetric(const Grid& g, int degree, std::uint64_t seed) {
  const int n = g.n();
  MatrixField m(g, n, Symmetry::real_symmetric);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m(i, j) = oracle::random_poly(g.dims(), degree, seed + 17 * i + j, true).sample(g);
      m(j, i) = m(i, j);
    }
  return m;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("test functions and the battery") {
    Grid g(Ambient::real, 2, 65, 4);
    const TestFunction phi = centered_bump(g, 0.2);
    const double c[] = {0.5, 0.5};
    CHECK(phi.value(c) == doctest::Approx(1.0));
    const double out[] = {0.71, 0.5};
    CHECK(phi.value(out) == 0.0);
    CHECK(phi.fits(g));

    // Closed-form derivatives against central differences.
    std::vector<double> grad, hess, gp, hp;
    const double x[] = {0.43, 0.58};
    phi.derivatives(x, grad, hess);
    const double e = 1e-5;
    for (int a = 0; a < 2; ++a) {
      double xp[] = {x[0], x[1]}, xm[] = {x[0], x[1]};
      xp[a] += e;
      xm[a] -= e;
      CHECK(grad[a] == doctest::Approx((phi.value(xp) - phi.value(xm)) / (2 * e)).epsilon(1e-6));
      phi.derivatives(xp, gp, hp);
      std::vector<double> gm, hm;
      phi.derivatives(xm, gm, hm);
      for (int b = 0; b < 2; ++b) CHECK(hess[a * 2 + b] == doctest::Approx((gp[b] - gm[b]) / (2 * e)).epsilon(1e-5));
    }

    const Battery b1 = make_battery(g), b2 = make_battery(g);
    REQUIRE(b1.size() == 10);
    for (std::size_t k = 0; k < b1.size(); ++k) {
      CHECK(b1[k].fits(g));
      CHECK(b1[k].radius == (k % 2 == 0 ? 0.1 : 0.2));
      CHECK(b1[k].center == b2[k].center);
      for (double cc : b1[k].center) CHECK(std::abs(cc * 32 - std::round(cc * 32)) < 1e-12);
    }
    CHECK_THROWS_AS(make_battery(g, 0), Error);
  }

  TEST_CASE("classical sigma_2 on closed-form examples") {
    Grid c2(Ambient::complex, 2, 9);
    CHECK(interior_err(classical_s2(abs2_sum(c2), Ambient::complex), ScalarField(c2, 1.0)) < 1e-10);
    Grid c3(Ambient::complex, 3, 9);
    CHECK(interior_err(classical_s2(abs2_sum(c3), Ambient::complex), ScalarField(c3, 3.0)) < 1e-10);

    // |z1|^2 |z2|^2: the off-diagonal product cancels the diagonal one.
    Grid g(Ambient::complex, 2, 17);
    auto prod = ScalarField::sample(g, [](std::span<const double> x) {
      return (x[0] * x[0] + x[1] * x[1]) * (x[2] * x[2] + x[3] * x[3]);
    });
    const ScalarField s = classical_s2(prod, Ambient::complex);
    CHECK(s.real_flag());
    CHECK(s.interior_max_abs() < 1e-10);

    Grid r(Ambient::real, 2, 9);
    CHECK_THROWS_AS(classical_s2(abs2_sum(r), Ambient::complex), Error);
    // x1^2 + x2^2 on R^2: sigma_2 of 2 Id is 4.
    CHECK(interior_err(classical_s2(abs2_sum(r), Ambient::real), ScalarField(r, 4.0)) < 1e-9);
  }

  TEST_CASE("classical sigma_2 matches the symbolic oracle on random cubics") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const oracle::Poly p = oracle::random_poly(3, 3, seed, true);
      double errs[2];
      const int sizes[] = {33, 65};
      for (int k = 0; k < 2; ++k) {
        Grid g(Ambient::real, 3, sizes[k], 1);
        const ScalarField expect =
            ScalarField::sample(g, [&](std::span<const double> x) { return oracle::sigma2_real(p, 3, x); });
        errs[k] = interior_err(classical_s2(p.sample(g), Ambient::real), expect);
      }
      // Central second differences are exact on cubics, so only roundoff remains.
      CHECK(errs[0] < 1e-8);
      CHECK(errs[1] < 1e-8);
    }
  }

  TEST_CASE("strong trace of curl curl on closed-form examples") {
    Grid c2(Ambient::complex, 2, 9);
    auto z1sq = ScalarField::sample(c2, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; });
    const auto a = MatrixField::scalar_identity(z1sq, Symmetry::hermitian);
    CHECK(interior_err(trace_curlcurl_strong(a), ScalarField(c2, 1.0)) < 1e-10);

    Grid r3(Ambient::real, 3, 9);
    auto x1sq = ScalarField::sample(r3, [](std::span<const double> x) { return x[0] * x[0]; });
    CHECK(interior_err(trace_curlcurl_strong(MatrixField::scalar_identity(x1sq, Symmetry::real_symmetric)),
                       ScalarField(r3, 4.0)) < 1e-9);

    // herm of the holomorphic map (z2^2, 0) lies in the kernel.
    VectorField w(c2, 2);
    w[0] = ScalarField::sample(c2, [](std::span<const double> x) {
      const cplx z2(x[2], x[3]);
      return z2 * z2;
    });
    CHECK(trace_curlcurl_strong(herm_grad(w, Ambient::complex)).interior_max_abs() < 1e-10);

    MatrixField none(c2, 2, Symmetry::none);
    CHECK_THROWS_AS(trace_curlcurl_strong(none), Error);
  }

  TEST_CASE("strong form of the rank-one matrix reproduces sigma_2") {
    // Cubics; on C^2 the stencils happen to be exact for them, which satisfies any C h^2 bound.
    struct Setup {
      Ambient mode;
      int n;
      int sizes[2];
    };
    const Setup setups[] = {{Ambient::real, 2, {33, 65}}, {Ambient::real, 3, {17, 33}}, {Ambient::complex, 2, {9, 17}}};
    for (const auto& s : setups) {
      for (std::uint64_t seed = 3; seed <= 4; ++seed) {
        const int dims = s.mode == Ambient::real ? s.n : 2 * s.n;
        const oracle::Poly p = oracle::random_poly(dims, 3, seed, true);
        std::vector<double> hs, errs;
        for (int N : s.sizes) {
          Grid g(s.mode, s.n, N, 2);
          const auto u = p.sample(g);
          ScalarField lhs = trace_curlcurl_strong(rank_one(gradient(u), s.mode));
          lhs *= -0.5;
          const ScalarField expect = ScalarField::sample(g, [&](std::span<const double> x) {
            return s.mode == Ambient::real ? oracle::sigma2_real(p, s.n, x) : oracle::sigma2_complex(p, s.n, x);
          });
          hs.push_back(g.spacing());
          errs.push_back(interior_err(lhs, expect));
        }
        INFO("mode " << to_string(s.mode) << " n=" << s.n << " errors " << errs[0] << " " << errs[1]);
        CHECK(errs[1] < 10.0 * hs[1] * hs[1]);
        if (errs[1] > 1e-9) CHECK(oracle::fitted_order(hs, errs) > 1.9);
      }
    }
  }

  TEST_CASE("weak pairing closed forms and structure") {
    Grid g(Ambient::real, 2, 65, 4);
    const TestFunction phi = centered_bump(g, 0.2);
    CHECK(std::abs(weak_pairing(MatrixField::identity(g, Symmetry::real_symmetric), phi)) < 1e-12);

    MatrixField diag(g, 2, Symmetry::real_symmetric);
    diag(0, 0) = ScalarField::sample(g, [](std::span<const double> x) { return x[1] * x[1]; });
    const cplx pair = weak_pairing(diag, phi);
    const cplx expect = integrate_against(ScalarField(g, 2.0), phi);
    CHECK(pair.real() > 0.0);
    CHECK(std::abs(pair - expect) < 1e-10 * std::abs(expect));

    // Bilinearity in the matrix argument.
    const MatrixField a = random_symmetric(g, 3, 5), k = random_symmetric(g, 2, 9);
    const cplx sum = weak_pairing(a + k, phi);
    CHECK(std::abs(sum - weak_pairing(a, phi) - weak_pairing(k, phi)) < 1e-13 * (1 + std::abs(sum)));

    TestFunction outside = centered_bump(g, 0.2);
    outside.center[0] = 0.1;
    CHECK_THROWS_AS(weak_pairing(a, outside), Error);
  }

  TEST_CASE("weak pairing of Hermitian fields is real") {
    Grid g(Ambient::complex, 2, 17, 1);
    MatrixField h(g, 2, Symmetry::hermitian);
    h(0, 0) = oracle::random_poly(4, 2, 1, true).sample(g);
    h(1, 1) = oracle::random_poly(4, 2, 2, true).sample(g);
    h(0, 1) = oracle::random_poly(4, 3, 3, false).sample(g);
    h(1, 0) = h(0, 1).conj();
    for (const auto& phi : make_battery(g, 4)) {
      const cplx p = weak_pairing(h, phi);
      CHECK(std::abs(p.imag()) <= 1e-10 * std::max(1e-12, std::abs(p)));
    }
  }

  TEST_CASE("weak and strong pairings agree by summation by parts") {
    for (int N : {33, 65}) {
      Grid g(Ambient::real, 2, N, 2);
      const MatrixField a = random_symmetric(g, 4, 21);
      for (const auto& phi : make_battery(g, 4)) {
        const cplx weak = weak_pairing(a, phi);
        CHECK(std::abs(weak - integrate_against(trace_curlcurl_strong(a), phi)) < 1e-11 * (1.0 + std::abs(weak)));
      }
    }
  }

  TEST_CASE("herm and sym gradients") {
    Grid g(Ambient::complex, 2, 9);
    VectorField w(g, 2);
    w[0] = ScalarField::sample(g, [](std::span<const double> x) { return cplx(x[0], x[1]); });
    const MatrixField m = herm_grad(w, Ambient::complex);
    CHECK(interior_err(m(0, 0), ScalarField(g, 1.0)) < 1e-12);
    CHECK(m(0, 1).max_abs() < 1e-12);
    CHECK(m(1, 1).max_abs() < 1e-12);
    w[0] *= cplx(0.0, 1.0);
    CHECK(herm_grad(w, Ambient::complex).max_abs() < 1e-12);

    Grid r(Ambient::real, 2, 9);
    VectorField v(r, 2);
    v[0] = ScalarField::sample(r, [](std::span<const double> x) { return x[1]; });
    const MatrixField s = herm_grad(v, Ambient::real);
    CHECK(interior_err(s(0, 1), ScalarField(r, 0.5)) < 1e-12);
    CHECK(s(0, 0).max_abs() < 1e-12);
    CHECK_THROWS_AS(herm_grad(VectorField(r, 3), Ambient::real), Error);
  }

  TEST_CASE("rank-one matrices") {
    Grid g(Ambient::complex, 2, 9);
    // u = Re(z1) * 2 has d_{z1} u = 1.
    const auto u = ScalarField::sample(g, [](std::span<const double> x) { return 2.0 * x[0] + x[3]; });
    const MatrixField r = rank_one(gradient(u), Ambient::complex);
    CHECK(interior_err(r(0, 0), ScalarField(g, 1.0)) < 1e-12);
    // d_{z2} u = -i/2, so the (0,1) entry is conj(1) * (-i/2).
    CHECK(interior_err(r(0, 1), ScalarField(g, cplx(0.0, -0.5))) < 1e-12);
    CHECK(r.symmetry_defect() < 1e-14);
    CHECK_THROWS_AS(rank_one(gradient(u), Ambient::real), Error);
  }

  TEST_CASE("kernel residual separates kernel and non-kernel fields") {
    Grid g(Ambient::real, 2, 65, 4);
    const Battery battery = make_battery(g);
    CHECK(kernel_residual(MatrixField::identity(g, Symmetry::real_symmetric), battery) < 1e-12);
    CHECK(kernel_residual(MatrixField(g, 2, Symmetry::real_symmetric), battery) == 0.0);

    MatrixField diag(g, 2, Symmetry::real_symmetric);
    diag(0, 0) = ScalarField::sample(g, [](std::span<const double> x) { return x[1] * x[1]; });
    CHECK(kernel_residual(diag, {centered_bump(g, 0.2)}) > 0.1);
    CHECK(kernel_residual(diag, battery) > 0.1);
    CHECK_THROWS_AS(kernel_residual(diag, {}), Error);
  }

  TEST_CASE("herm gradients of random cubic maps pass the kernel residual") {
    for (Ambient mode : {Ambient::real, Ambient::complex}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const int N = mode == Ambient::real ? 65 : 17;
        Grid g(mode, 2, N, mode == Ambient::real ? 4 : 1);
        const int dims = g.dims();
        VectorField w(g, 2);
        for (int i = 0; i < 2; ++i) w[i] = oracle::random_poly(dims, 3, 10 * seed + i, mode == Ambient::real).sample(g);
        const double h = g.spacing();
        const double res = kernel_residual(herm_grad(w, mode), make_battery(g, mode == Ambient::real ? 10 : 4));
        INFO(to_string(mode) << " seed " << seed << " residual " << res);
        CHECK(res <= 10.0 * h * h);
      }
    }
  }

  TEST_CASE("very weak sigma_2 on smooth examples") {
    Grid g(Ambient::complex, 2, 17, 1);
    const Battery battery = make_battery(g, 4);
    const double h2 = g.spacing() * g.spacing();
    const auto u = abs2_sum(g);
    const auto rep = very_weak_s2(gradient(u), ScalarField(g, 1.0), battery, Ambient::complex);
    CHECK(rep.residuals.size() == 4);
    for (double r : rep.residuals) CHECK(r >= 0.0);
    CHECK(rep.max_residual <= 10.0 * h2);
    CHECK(rep.rms_residual <= rep.max_residual);

    const auto x1sq = ScalarField::sample(g, [](std::span<const double> x) { return x[0] * x[0]; });
    CHECK(very_weak_s2(gradient(x1sq), ScalarField(g), battery, Ambient::complex).max_residual <= 10.0 * h2);
    CHECK_THROWS_AS(very_weak_s2(gradient(u), ScalarField(g), {}, Ambient::complex), Error);
  }

  TEST_CASE("d d^c formulation agrees with the very weak pairing") {
    Grid g(Ambient::complex, 2, 17, 1);
    const Battery battery = make_battery(g, 4);
    const double h2 = g.spacing() * g.spacing();

    const auto cmp = ddc_compare(abs2_sum(g), ScalarField(g, 1.0), battery);
    REQUIRE(cmp.ddc_pairings.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(cmp.ddc_pairings[k] > 0.0);
    CHECK(cmp.discrepancy <= 10.0 * h2 * std::abs(cmp.very_weak_pairings[0]));

    // Re z1^2 is pluriharmonic: both pairings vanish up to discretization.
    const auto ph = ScalarField::sample(g, [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; });
    const auto zero = ddc_compare(ph, ScalarField(g), battery);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(zero.ddc_pairings[k]) < 1e-8);
      CHECK(std::abs(zero.very_weak_pairings[k]) < 1e-8);
    }

    std::vector<double> hs, errs;
    const oracle::Poly p = oracle::random_poly(4, 3, 77, true);
    for (int N : {9, 17}) {
      Grid gg(Ambient::complex, 2, N, 1);
      hs.push_back(gg.spacing());
      errs.push_back(ddc_pairing_residual(p.sample(gg), ScalarField(gg), make_battery(gg, 2)));
    }
    INFO("ddc discrepancies " << errs[0] << " " << errs[1]);
    CHECK((errs[1] < 1e-10 || oracle::fitted_order(hs, errs) > 1.5));

    Grid r(Ambient::real, 2, 17, 1);
    CHECK_THROWS_AS(ddc_pairing_residual(ScalarField(r), ScalarField(r), make_battery(r, 1)), Error);
  }
}
