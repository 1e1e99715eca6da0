#include "s2hess/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "s2hess/stencil.hpp"

namespace s2hess {
namespace {

constexpr std::uint64_t kPairSeed = 0x5eedf00dULL;
constexpr int kRandomPairs = 2048;
constexpr double kLattice = 32.0;

void check_args(int k, double alpha) {
  require(k >= 0 && k <= 3, ErrorCode::unsupported_order, "estimate_norm: k must be in [0, 3]");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_exponent,
          "estimate_norm: alpha must lie in (0, 1)");
}

// All multi-indices of total order `k` in `d` variables.
void multi_indices(int d, int k, std::vector<int>& cur, int axis, std::vector<std::vector<int>>& out) {
  if (axis == d - 1) {
    cur[axis] = k;
    out.push_back(cur);
    return;
  }
  for (int m = k; m >= 0; --m) {
    cur[axis] = m;
    multi_indices(d, k - m, cur, axis + 1, out);
  }
  cur[axis] = 0;
}

// Grid index range [lo, hi] of the interior sub-box along every axis.
std::pair<int, int> interior_range(const Grid& g) {
  return {g.margin(), g.points() - 1 - g.margin()};
}

}  // namespace

double NormReport::ck_norm() const noexcept {
  double s = 0.0;
  for (double v : sup) s += v;
  return s;
}

double NormReport::holder_norm() const noexcept { return ck_norm() + holder; }

double holder_seminorm(const ScalarField& f, double alpha, std::size_t* pairs) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_exponent, "holder: alpha must lie in (0, 1)");
  const Grid& g = f.grid();
  const auto& v = f.values();
  const double h = g.spacing();
  const auto [lo, hi] = interior_range(g);
  const int span = hi - lo;
  double best = 0.0;
  std::size_t count = 0;

  // Axis-aligned pairs at dyadic separations.
  std::vector<double> inv_dist;
  for (int s = 1; s <= span; s *= 2) inv_dist.push_back(std::pow(s * h, -alpha));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.in_interior(i)) continue;
    for (int a = 0; a < g.dims(); ++a) {
      const int c = g.coord(i, a);
      const std::size_t stride = g.stride(a);
      int m = 0;
      for (int s = 1; c + s <= hi; s *= 2, ++m) {
        best = std::max(best, std::abs(v[i + s * stride] - v[i]) * inv_dist[m]);
        ++count;
      }
    }
  }

  // Random pairs on a fixed physical lattice, snapped to the nearest node.
  const int klo = static_cast<int>(std::ceil(lo * h * kLattice - 1e-9));
  const int khi = static_cast<int>(std::floor(hi * h * kLattice + 1e-9));
  if (khi > klo) {
    std::mt19937_64 rng(kPairSeed);
    std::uniform_int_distribution<int> pick(klo, khi);
    std::vector<int> p(g.dims()), q(g.dims());
    for (int r = 0; r < kRandomPairs; ++r) {
      double dist2 = 0.0;
      for (int a = 0; a < g.dims(); ++a) {
        p[a] = std::clamp(static_cast<int>(std::lround(pick(rng) / kLattice / h)), lo, hi);
        q[a] = std::clamp(static_cast<int>(std::lround(pick(rng) / kLattice / h)), lo, hi);
        const double dx = (p[a] - q[a]) * h;
        dist2 += dx * dx;
      }
      if (dist2 == 0.0) continue;
      const double diff = std::abs(v[g.flatten(p)] - v[g.flatten(q)]);
      best = std::max(best, diff / std::pow(dist2, 0.5 * alpha));
      ++count;
    }
  }
  if (pairs) *pairs = count;
  return best;
}

NormReport estimate_norm(const ScalarField& f, int k, double alpha) {
  check_args(k, alpha);
  const Grid& g = f.grid();
  NormReport r;
  r.order = k;
  r.alpha = alpha;
  r.region_lo = g.interior_lo();
  r.region_hi = g.interior_hi();
  r.sup.assign(k + 1, 0.0);
  std::vector<int> cur(g.dims(), 0);
  for (int j = 0; j <= k; ++j) {
    std::vector<std::vector<int>> idx;
    multi_indices(g.dims(), j, cur, 0, idx);
    for (const auto& m : idx) {
      const ScalarField dj = j == 0 ? f : derivative(f, m);
      r.sup[j] = std::max(r.sup[j], dj.interior_max_abs());
      if (j == k) {
        std::size_t pairs = 0;
        r.holder = std::max(r.holder, holder_seminorm(dj, alpha, &pairs));
        r.pair_count += pairs;
      }
    }
  }
  return r;
}

NormReport max_report(const std::vector<NormReport>& parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "max_report: nothing to combine");
  NormReport r = parts.front();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    for (std::size_t j = 0; j < r.sup.size(); ++j) r.sup[j] = std::max(r.sup[j], parts[p].sup[j]);
    r.holder = std::max(r.holder, parts[p].holder);
    r.pair_count += parts[p].pair_count;
  }
  return r;
}

NormReport estimate_norm(const VectorField& f, int k, double alpha) {
  std::vector<NormReport> parts;
  for (int i = 0; i < f.components(); ++i) parts.push_back(estimate_norm(f[i], k, alpha));
  return max_report(parts);
}

NormReport estimate_norm(const MatrixField& m, int k, double alpha) {
  std::vector<NormReport> parts;
  const bool mirrored = m.symmetry() != Symmetry::none;
  for (int i = 0; i < m.order(); ++i)
    for (int j = mirrored ? i : 0; j < m.order(); ++j) parts.push_back(estimate_norm(m(i, j), k, alpha));
  return max_report(parts);
}

double interpolate_norm_bound(const NormReport& report0, const NormReport& report1, double alpha) {
  require(!report0.sup.empty() && report1.sup.size() >= 2, ErrorCode::invalid_argument,
          "interpolate_norm_bound: reports must carry ||f||_0 and |f|_1");
  return std::pow(report0.sup[0], 1.0 - alpha) * std::pow(report1.sup[1], alpha);
}

}  // namespace s2hess
