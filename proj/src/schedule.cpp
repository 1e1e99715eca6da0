#include "s2hess/schedule.hpp"

#include <cmath>
#include <limits>

namespace s2hess {

double ScheduleParams::kappa() const {
  return mode == Ambient::complex ? 2.0 - 2.0 * n / p : 2.0 - static_cast<double>(n) / p;
}

void ScheduleParams::validate() const {
  require(a > 1.0 && std::isfinite(a), ErrorCode::invalid_argument, "schedule: a must exceed 1");
  require(b > 1.0 && std::isfinite(b), ErrorCode::invalid_argument, "schedule: b must exceed 1");
  require(c > 1.0 && std::isfinite(c), ErrorCode::invalid_argument, "schedule: c must exceed 1");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_exponent, "schedule: alpha must lie in (0, 1)");
  require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_exponent, "schedule: beta must lie in (0, 1)");
  require(sigma > 0.0 && K > 0.0 && C_prime > 0.0 && C_mu > 0.0 && C_l > 0.0, ErrorCode::invalid_argument,
          "schedule: sigma, K and the constants must be positive");
  require(n >= 2, ErrorCode::invalid_argument, "schedule: n must be at least 2");
  require(p > 0.0, ErrorCode::invalid_argument, "schedule: p must be positive");
}

SequenceValue sequences(const ScheduleParams& params, int q) {
  require(q >= 0, ErrorCode::invalid_argument, "sequences: q must be nonnegative");
  require(q <= 40, ErrorCode::overflow, "sequences: q above 40 is outside the supported range");
  params.validate();
  const double la = std::log(params.a);
  SequenceValue s;
  s.log_delta = -std::pow(params.b, q) * la;
  s.log_lambda = params.c * std::pow(params.b, q + 1) * la;
  s.delta = std::exp(s.log_delta);
  s.lambda = std::exp(s.log_lambda);
  return s;
}

const FeasibilityEntry& FeasibilityReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  fail(ErrorCode::invalid_argument, "feasibility report has no entry named " + name);
}

double growth_lower_bound(double alpha, int n) { return 2.0 / ((2.0 - alpha) * std::pow(1.0 - alpha, n)); }

namespace {

struct ExponentSides {
  double lhs1, rhs1, lhs2, rhs2;
};

ExponentSides exponent_sides(double b, double c, double alpha, int n, double kappa) {
  const double shrink = std::pow(1.0 - alpha, n);
  const double k = 2.0 * b * c + b - 1.0;
  return {c * b * (b * (2.0 - alpha) * shrink - 2.0),
          (b - 1.0) * (1.0 + b * (2.0 - alpha) * (1.0 - shrink) / alpha),
          kappa * k,
          b * b * (2.0 - alpha) + alpha * k};
}

FeasibilityEntry entry(std::string name, double lhs, double rhs, bool strict) {
  const double margin = lhs - rhs;
  return {std::move(name), lhs, rhs, margin, strict ? margin > 0.0 : margin >= 0.0};
}

}  // namespace

FeasibilityReport check_feasibility(const ScheduleParams& params, int stages) {
  params.validate();
  FeasibilityReport r;
  const auto s = exponent_sides(params.b, params.c, params.alpha, params.n, params.kappa());
  r.entries.push_back(entry("frequency_exponent", s.lhs1, s.rhs1, false));
  r.entries.push_back(entry("integrability_exponent", s.lhs2, s.rhs2, false));
  r.entries.push_back(entry("growth_lower_bound", params.b, growth_lower_bound(params.alpha, params.n), true));
  r.entries.push_back(entry("cauchy_beta", 1.0 / (2.0 * params.b * params.c), params.beta, true));
  for (int q = 0; q < stages; ++q) {
    const double rhs = std::log(params.sigma) + sequences(params, q + 1).log_delta;
    r.entries.push_back(entry("delta_step_q" + std::to_string(q), rhs, sequences(params, q + 2).log_delta, false));
  }
  for (const auto& e : r.entries) r.pass = r.pass && e.pass;
  return r;
}

Thresholds thresholds(int n, Ambient mode) {
  require(n >= 2, ErrorCode::invalid_argument, "thresholds: n must be at least 2");
  Thresholds t;
  t.beta_max = 1.0 / (1.0 + 2.0 * n);
  t.kappa_min = 2.0 / (1.0 + 2.0 * n);
  t.p_min = mode == Ambient::complex ? n + 0.5 : (2.0 * n + 1.0) / 4.0;
  return t;
}

double minimal_frequency_exponent(double b, double alpha, int n, double kappa) {
  const double shrink = std::pow(1.0 - alpha, n);
  const double slope = b * (b * (2.0 - alpha) * shrink - 2.0);
  if (!(slope > 0.0)) return std::numeric_limits<double>::infinity();
  double c = (b - 1.0) * (1.0 + b * (2.0 - alpha) * (1.0 - shrink) / alpha) / slope;
  if (kappa > 0.0) {
    if (!(kappa > alpha)) return std::numeric_limits<double>::infinity();
    c = std::max(c, (b * b * (2.0 - alpha) / (kappa - alpha) - (b - 1.0)) / (2.0 * b));
  }
  return std::max(c, 1.0);
}

BetaSweepResult beta_sweep(int n, double alpha, double kappa, int samples, double b_max) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_exponent, "beta_sweep: alpha must lie in (0, 1)");
  require(samples >= 2, ErrorCode::invalid_argument, "beta_sweep: need at least two samples");
  const double b_low = growth_lower_bound(alpha, n);
  require(b_max > b_low, ErrorCode::invalid_argument, "beta_sweep: b_max below the growth bound");
  BetaSweepResult best{alpha, 0.0, 0.0, 0.0};
  // Offsets above the bound spread logarithmically from 1e-9 to b_max - b_low.
  const double lo = std::log(1e-9), hi = std::log(b_max - b_low);
  for (int i = 0; i < samples; ++i) {
    const double b = b_low + std::exp(lo + (hi - lo) * i / (samples - 1));
    const double c = minimal_frequency_exponent(b, alpha, n, kappa);
    if (!std::isfinite(c)) continue;
    const double beta = 1.0 / (2.0 * b * c);
    if (beta > best.beta_sup) best = {alpha, b, c, beta};
  }
  return best;
}

double mollification_scale(const ScheduleParams& params, int q) {
  const auto s0 = sequences(params, q);
  const auto s1 = sequences(params, q + 1);
  const double log_rhs = std::log(params.sigma) - std::log(params.C_l) - 2.0 * std::log(params.K) + s1.log_delta -
                         s0.log_delta - 2.0 * s0.log_lambda;
  return std::exp(log_rhs / (2.0 - params.alpha));
}

MuLadder mu_ladder(const ScheduleParams& params, int q, double l) {
  params.validate();
  require(l > 0.0 && std::isfinite(l), ErrorCode::invalid_argument, "mu_ladder: l must be positive");
  const auto s1 = sequences(params, q + 1);
  const auto s2 = sequences(params, q + 2);
  const double alpha = params.alpha;
  const int n = params.n;

  MuLadder out;
  out.step_ratio = params.sigma * std::exp(s2.log_delta - s1.log_delta) / params.C_prime;
  std::vector<double> log_mu(n + 1);
  log_mu[0] = -std::log(l);
  for (int j = 1; j < n; ++j) log_mu[j] = (log_mu[j - 1] - std::log(out.step_ratio)) / (1.0 - alpha);
  log_mu[n] = s1.log_lambda;

  const double grow = std::pow(1.0 - alpha, -n);
  out.log_required = grow * log_mu[0] + (grow - 1.0) / alpha * s1.log_delta + (1.0 - grow) / alpha * s2.log_delta +
                     std::log(params.C_mu);
  out.log_margin = s1.log_lambda - out.log_required;
  out.admissible = out.log_margin >= 0.0;

  for (int j = 1; j <= n; ++j)
    require(log_mu[j] > log_mu[j - 1], ErrorCode::schedule_infeasible,
            "mu_ladder: frequency ladder is not increasing at step " + std::to_string(j));
  for (double lm : log_mu) out.mu.push_back(std::exp(lm));
  return out;
}

}  // namespace s2hess
