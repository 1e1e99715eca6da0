#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "s2hess/field.hpp"
#include "s2hess/jet.hpp"
#include "s2hess/operators.hpp"
#include "s2hess/schedule.hpp"
#include "s2hess/stage.hpp"

namespace s2hess {

const char* library_version() noexcept;

/// Built-in sources for f and the target function.
///   constant: value
///   trig:     offset + amplitude * prod_a sin(pi * modes[a] * x_a), axes with
///             mode 0 (or beyond the list) contribute a factor 1
///   file:     a scalar dump "<dir>/<name>" written by write_field
struct GeneratorSpec {
  std::string kind = "constant";
  double value = 0.0;
  double offset = 0.0;
  double amplitude = 1.0;
  std::vector<int> modes;
  std::string path;
};

ScalarField generate(const GeneratorSpec& spec, const Grid& grid);
/// Closed-form jets for constant and trig sources, finite differences for files.
ScalarJet generate_jet(const GeneratorSpec& spec, const Grid& grid);

struct Tolerances {
  double kernel_residual = 0.05;
  double telescoping = 1e-9;
  double decomposition = 1e-9;
};

struct RunConfig {
  Ambient mode = Ambient::real;
  int n = 2;
  int resolution = 129;
  int margin = -1;  // -1 selects max(4, resolution / 16)
  GeneratorSpec f{"constant", 1.0, 0.0, 1.0, {}, ""};
  GeneratorSpec u_flat{"constant", 0.0, 0.0, 1.0, {}, ""};
  double epsilon = 1.0;
  ScheduleParams schedule;
  int stages = 3;
  Tolerances tolerances;
  GridRealization realization;

  int effective_margin() const;
  Grid grid() const;
};

/// Parses the JSON configuration; unknown keys are rejected with a parse error.
RunConfig parse_config(const std::string& json_text);
std::string config_to_json(const RunConfig& config);

struct ProblemSetup {
  Grid grid;
  ScalarField f;
  ScalarField u;        // Poisson potential with -tr curl curl (u Id) = f
  ScalarJet u_flat;
  MatrixField target;   // A = (u + tau) Id
  MatrixField scaled_target;  // delta_1 / tau * A
  double tau = 0.0;
  double u_kappa_norm = 0.0;
  double u_flat_c2 = 0.0;
  double strong_residual = 0.0;  // interior max |-tr curl curl A - f|
  StageState initial;
};

ProblemSetup setup_problem(const RunConfig& config);

struct Verification {
  double decomposition_residual = 0.0;  // ||1/2 R(v) + herm dw + K - A||_0
  double kernel_residual_k = 0.0;
  double kernel_residual_herm = 0.0;
  WeakResidualReport definitional;
};

/// Checks a rescaled solution against the target and the right-hand side.
Verification verify_solution(const ScalarJet& v, const VectorJet& w, const MatrixField& kernel,
                             const MatrixField& target, const ScalarField& f, const Battery& battery);

struct StageRecord {
  StageLedger ledger;
  double delta = 0.0;    // delta_{q+1}
  double lambda = 0.0;   // lambda_{q+1}
  double deficit_holder = 0.0;  // ||D_{q+1}||_alpha
  double deficit_sup = 0.0;
  double cauchy_increment = 0.0;  // ||v_{q+1} - v_q||_1^(1-beta) ||v_{q+1} - v_q||_2^beta
  double cauchy_bound = 0.0;      // K delta_{q+1}^(1/2) lambda^_{q+1}^beta
  double definitional_residual = 0.0;
  double kernel_residual = 0.0;
  double seconds = 0.0;
};

struct RunReport {
  FeasibilityReport feasibility;
  std::vector<StageRecord> stages;
  int stages_requested = 0;
  bool completed = false;
  int error_code = 0;
  std::string error_message;
  double initial_deficit_holder = 0.0;
  double initial_definitional_residual = 0.0;
  Verification verification;
  double closeness = 0.0;        // ||v_Q - v_0||_0 in scaled units
  double closeness_bound = 0.0;  // sum_q K delta_{q+1}^(1/2)
  double distance_to_target = 0.0;  // ||v - u_flat||_0 after rescaling
  double tau = 0.0;
  double strong_residual = 0.0;
  double total_seconds = 0.0;
};

struct RunResult {
  RunConfig config;
  ProblemSetup setup;
  StageState state;  // last state, scaled units
  ScalarJet v;       // rescaled solution
  VectorJet w;
  MatrixField kernel;
  RunReport report;
};

/// Runs the configured number of stages. Stage errors end the loop early;
/// the report then carries the error and everything computed so far.
RunResult run(const RunConfig& config);

std::string report_to_json(const RunReport& report);
std::string ledger_to_json(const StageLedger& ledger);

/// Writes metadata.json, per-stage ledgers, field dumps, convergence.csv and report.json.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

/// Recomputes the verification from the dumps in an output directory.
Verification verify_directory(const std::filesystem::path& dir);
std::string verification_to_json(const Verification& v);

}  // namespace s2hess
