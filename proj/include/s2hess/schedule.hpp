#pragma once

#include <string>
#include <vector>

#include "s2hess/field.hpp"

namespace s2hess {

struct ScheduleParams {
  double a = 1e4;       // base, > 1
  double b = 1.05;      // growth, > 1
  double c = 2.6;       // frequency exponent, > 1
  double alpha = 0.05;  // Hoelder index in (0, 1)
  double beta = 0.1;    // target C^{1,beta} regularity
  double sigma = 0.65;
  double K = 20.0;
  double C_prime = 3.0;
  int n = 2;
  Ambient mode = Ambient::real;
  double p = 8.0;        // integrability exponent of f
  double C_mu = 1.0;     // constant of the top-frequency admissibility bound
  double C_l = 10.0;     // constant in the mollification-scale formula

  /// Hoelder exponent of A: 2 - 2n/p (complex), 2 - n/p (real).
  double kappa() const;
  /// Throws invalid_argument when a field is outside its domain.
  void validate() const;
};

struct SequenceValue {
  double log_delta = 0.0;   // natural logarithms
  double log_lambda = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
};

/// delta_q = a^(-b^q), lambda_q = a^(c b^(q+1)), computed in log space.
SequenceValue sequences(const ScheduleParams& params, int q);

struct FeasibilityEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct FeasibilityReport {
  std::vector<FeasibilityEntry> entries;
  bool pass = true;

  const FeasibilityEntry& find(const std::string& name) const;
};

/// The exponent inequalities, the strict lower bound on b and beta < 1/(2bc).
/// With stages > 0 the step condition delta_{q+2} <= sigma delta_{q+1} is
/// added for q = 0 .. stages - 1 (compared in log space).
FeasibilityReport check_feasibility(const ScheduleParams& params, int stages = 0);

struct Thresholds {
  double beta_max = 0.0;
  double p_min = 0.0;
  double kappa_min = 0.0;
};

Thresholds thresholds(int n, Ambient mode);

/// Strict lower bound 2 / ((2 - alpha)(1 - alpha)^n) on b.
double growth_lower_bound(double alpha, int n);

/// Smallest c satisfying the first exponent inequality at (b, alpha, n), and
/// the second one too when kappa > alpha is given. Infinity when b is at or
/// below the growth bound.
double minimal_frequency_exponent(double b, double alpha, int n, double kappa = 0.0);

struct BetaSweepResult {
  double alpha = 0.0;
  double best_b = 0.0;
  double best_c = 0.0;
  double beta_sup = 0.0;  // sup of 1/(2bc) over the admissible grid points
};

/// Scans b on a logarithmic grid above the growth bound, takes the minimal
/// admissible c at each b, and maximizes 1/(2bc).
BetaSweepResult beta_sweep(int n, double alpha, double kappa = 0.0, int samples = 4000, double b_max = 4.0);

/// Mollification scale with l^(2-alpha) = sigma delta_{q+1} / (C_l K^2 delta_q lambda_q^2).
double mollification_scale(const ScheduleParams& params, int q);

struct MuLadder {
  std::vector<double> mu;          // mu_0 .. mu_n
  double step_ratio = 0.0;         // sigma delta_{q+2} / (C' delta_{q+1})
  double log_required = 0.0;       // log of the admissibility bound on lambda_{q+1}
  double log_margin = 0.0;         // log lambda_{q+1} - log_required
  bool admissible = false;
};

/// mu_0 = 1/l, mu_{j-1} / mu_j^(1-alpha) = step_ratio for j < n, mu_n = lambda_{q+1}.
/// Throws schedule_infeasible when the ladder is not increasing.
MuLadder mu_ladder(const ScheduleParams& params, int q, double l);

}  // namespace s2hess
