#pragma once

#include <map>
#include <string>
#include <vector>

#include "s2hess/field.hpp"
#include "s2hess/jet.hpp"
#include "s2hess/schedule.hpp"

namespace s2hess {

/// Measured norms of a stage state (interior sub-box only).
struct StageNorms {
  double v1 = 0.0, v2 = 0.0;  // ||v||_1, ||v||_2 from the carried jet
  double w1 = 0.0, w2 = 0.0;  // ||w||_1 from the jet, second derivatives by differencing the Jacobian
  double k0 = 0.0, k1 = 0.0;  // ||K||_0, ||K||_1
  double deficit_sup = 0.0;
  double deficit_holder = 0.0;  // ||D||_alpha
};

struct StageState {
  int q = 0;
  ScalarJet v;
  VectorJet w;
  MatrixField kernel;
  MatrixField deficit;
  /// Largest frequency actually present in v and w; bounds of second
  /// derivatives are compared against this rather than the nominal lambda_q.
  double top_frequency = 0.0;
  StageNorms norms;
};

StageNorms measure_state(const ScalarJet& v, const VectorJet& w, const MatrixField& kernel,
                         const MatrixField& deficit, double alpha);

/// A - (1/2 dv (x) dbar v + herm dw) - K - delta_next Id.
MatrixField compute_deficit(const MatrixField& target, const ScalarJet& v, const VectorJet& w,
                            const MatrixField& kernel, double delta_next);
MatrixField compute_deficit(const MatrixField& target, const ScalarField& v, const VectorField& w,
                            const MatrixField& kernel, double delta_next);

/// Builds the q = 0 state for the target: jets of v, zero kernel, measured deficit.
StageState initial_state(const MatrixField& target, const ScalarJet& v, const VectorJet& w,
                         const ScheduleParams& params, double top_frequency);

/// How the asymptotic schedule is realized on a finite grid.
struct GridRealization {
  /// Phase frequencies are capped at cap_factor / h.
  double cap_factor = 0.125;
  /// First corrugation frequency of the realized ladder.
  double mu_floor = 1.0;
  /// Mollification scale is clamped to [l_min_cells * h, l_max].
  double l_min_cells = 2.0;
  double l_max = 0.24;
  double sigma_tilde = 2.0;
  /// Throw on a failed hypothesis instead of recording it.
  bool strict = true;
  /// Also compute the kernel residual and mollifier commutator diagnostics.
  bool diagnostics = true;

  /// Largest admissible corrugation frequency mu on this grid.
  double mu_cap(const Grid& grid) const;
};

struct LedgerEntry {
  std::string name;
  std::string kind;  // "hypothesis", "intermediate" or "conclusion"
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct StageLedger {
  int q = 0;
  std::vector<LedgerEntry> entries;
  std::vector<std::string> warnings;
  std::map<std::string, double> diagnostics;
  double l_nominal = 0.0, l_used = 0.0;
  std::vector<double> mu_nominal, mu_used;
  std::vector<double> perturbation_sup;     // ||E_j||_0
  std::vector<double> perturbation_holder;  // ||E_j||_alpha

  bool passes(const std::string& kind) const;
  bool all_pass() const;
  const LedgerEntry& find(const std::string& name) const;
};

struct StageResult {
  StageState state;
  StageLedger ledger;
};

/// Checks the stage hypotheses on `state` (hypothesis_violation in strict
/// mode), then mollifies, diagonalizes the mollified deficit, corrugates in
/// every direction and certifies the conclusions with measured values.
StageResult run_stage(const StageState& state, const ScheduleParams& params, const MatrixField& target,
                      const GridRealization& realization = {});

/// Frequencies mu_1 .. mu_n used on the grid: geometric from `floor` to `top`.
/// Throws schedule_infeasible unless floor < top (or n = 1).
std::vector<double> realize_ladder(int n, double floor, double top);

}  // namespace s2hess
