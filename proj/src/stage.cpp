#include "s2hess/stage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "s2hess/corrugation.hpp"
#include "s2hess/diagonal.hpp"
#include "s2hess/mollify.hpp"
#include "s2hess/norms.hpp"
#include "s2hess/operators.hpp"
#include "s2hess/stencil.hpp"

namespace s2hess {

namespace {

double max_interior(const std::vector<ScalarField>& fields) {
  double m = 0.0;
  for (const auto& f : fields) m = std::max(m, f.interior_max_abs());
  return m;
}

ScalarJet mollify_jet(const Mollifier& mol, const ScalarJet& v) {
  ScalarJet out(v.grid());
  out.value = mol.apply(v.value);
  for (std::size_t a = 0; a < v.grad.size(); ++a) out.grad[a] = mol.apply(v.grad[a]);
  for (std::size_t a = 0; a < v.hess.size(); ++a) out.hess[a] = mol.apply(v.hess[a]);
  return out;
}

VectorJet mollify_jet(const Mollifier& mol, const VectorJet& w) {
  VectorJet out(w.grid(), w.components());
  for (int i = 0; i < w.components(); ++i) {
    out.value[i] = mol.apply(w.value[i]);
    for (std::size_t a = 0; a < w.jac[i].size(); ++a) out.jac[i][a] = mol.apply(w.jac[i][a]);
  }
  return out;
}

double holder_norm0(const MatrixField& m, double alpha) { return estimate_norm(m, 0, alpha).holder_norm(); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

}  // namespace

StageNorms measure_state(const ScalarJet& v, const VectorJet& w, const MatrixField& kernel,
                         const MatrixField& deficit, double alpha) {
  StageNorms s;
  s.v1 = v.value.interior_max_abs() + max_interior(v.grad);
  s.v2 = s.v1 + max_interior(v.hess);
  double jac_sup = 0.0, jac_diff = 0.0;
  for (int i = 0; i < w.components(); ++i) {
    jac_sup = std::max(jac_sup, max_interior(w.jac[i]));
    for (const auto& d : w.jac[i]) jac_diff = std::max(jac_diff, max_interior(gradient(d)));
  }
  s.w1 = max_interior(w.value) + jac_sup;
  s.w2 = s.w1 + jac_diff;
  s.k0 = kernel.interior_max_abs();
  s.k1 = estimate_norm(kernel, 1, alpha).ck_norm();
  const NormReport dr = estimate_norm(deficit, 0, alpha);
  s.deficit_sup = dr.sup.at(0);
  s.deficit_holder = dr.holder_norm();
  return s;
}

MatrixField compute_deficit(const MatrixField& target, const ScalarJet& v, const VectorJet& w,
                            const MatrixField& kernel, double delta_next) {
  const Ambient mode = target.grid().kind();
  MatrixField d = target;
  d -= quadratic_part(v, w, mode);
  d -= kernel;
  d.add_identity(-delta_next);
  d.set_symmetry(natural_symmetry(mode));
  return d;
}

MatrixField compute_deficit(const MatrixField& target, const ScalarField& v, const VectorField& w,
                            const MatrixField& kernel, double delta_next) {
  return compute_deficit(target, ScalarJet::from_field(v), VectorJet::from_field(w), kernel, delta_next);
}

StageState initial_state(const MatrixField& target, const ScalarJet& v, const VectorJet& w,
                         const ScheduleParams& params, double top_frequency) {
  const Grid& g = target.grid();
  StageState s{0, v, w, MatrixField(g, g.n(), natural_symmetry(g.kind())), target, top_frequency, {}};
  s.deficit = compute_deficit(target, v, w, s.kernel, sequences(params, 1).delta);
  s.norms = measure_state(s.v, s.w, s.kernel, s.deficit, params.alpha);
  return s;
}

double GridRealization::mu_cap(const Grid& grid) const {
  return cap_factor / grid.spacing() / (grid.kind() == Ambient::complex ? 2.0 : 1.0);
}

bool StageLedger::passes(const std::string& kind) const {
  return std::all_of(entries.begin(), entries.end(), [&](const LedgerEntry& e) { return e.kind != kind || e.pass; });
}

bool StageLedger::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const LedgerEntry& e) { return e.pass; });
}

const LedgerEntry& StageLedger::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  fail(ErrorCode::invalid_argument, "stage ledger has no entry named " + name);
}

std::vector<double> realize_ladder(int n, double floor, double top) {
  require(n >= 1, ErrorCode::invalid_argument, "realize_ladder: n must be positive");
  require(floor > 0.0 && top > 0.0, ErrorCode::invalid_argument, "realize_ladder: frequencies must be positive");
  if (n == 1) return {top};
  require(floor < top, ErrorCode::schedule_infeasible,
          "realize_ladder: frequency floor " + fmt(floor) + " is not below the top frequency " + fmt(top));
  std::vector<double> mu(n);
  for (int j = 0; j < n; ++j) mu[j] = floor * std::pow(top / floor, static_cast<double>(j) / (n - 1));
  mu[n - 1] = top;
  return mu;
}

StageResult run_stage(const StageState& state, const ScheduleParams& params, const MatrixField& target,
                      const GridRealization& realization) {
  params.validate();
  const Grid& g = target.grid();
  const Ambient mode = g.kind();
  const int n = g.n();
  const int q = state.q;
  require(params.n == n && params.mode == mode, ErrorCode::wrong_ambient,
          "run_stage: schedule dimension or mode does not match the grid");
  require(state.deficit.grid().same_shape(g), ErrorCode::invalid_argument, "run_stage: state lives on another grid");

  const auto s_q = sequences(params, q);
  const auto s_1 = sequences(params, q + 1);
  const auto s_2 = sequences(params, q + 2);
  const double delta1 = s_1.delta, delta2 = s_2.delta;
  const double sqrt_d0 = std::sqrt(s_q.delta), sqrt_d1 = std::sqrt(delta1);

  StageResult res{state, {}};
  StageLedger& led = res.ledger;
  led.q = q;
  auto record = [&](const std::string& name, const std::string& kind, double lhs, double rhs) {
    led.entries.push_back({name, kind, lhs, rhs, lhs <= rhs});
    return led.entries.back().pass;
  };

  // Hypotheses, measured on the incoming state.
  const StageNorms& in = state.norms;
  std::vector<std::string> failed;
  if (!record("c1_bound", "hypothesis", in.v1 + in.w1 + in.k0, params.K)) failed.push_back("c1_bound");
  if (!record("c2_bound", "hypothesis", in.v2 + in.w2 + in.k1, params.K * sqrt_d0 * state.top_frequency))
    failed.push_back("c2_bound");
  if (!record("deficit_bound", "hypothesis", in.deficit_holder, params.sigma * delta1))
    failed.push_back("deficit_bound");
  if (!record("delta_step", "hypothesis", delta2, params.sigma * delta1)) failed.push_back("delta_step");
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    if (realization.strict)
      fail(ErrorCode::hypothesis_violation, "stage " + std::to_string(q) + ": hypothesis violated: " + names);
    led.warnings.push_back("hypotheses violated: " + names);
  }

  // Mollification scale: nominal value, clamped to what the grid resolves.
  const double h = g.spacing();
  led.l_nominal = mollification_scale(params, q);
  led.l_used = std::clamp(led.l_nominal, realization.l_min_cells * h, realization.l_max);
  if (led.l_used != led.l_nominal)
    led.warnings.push_back("mollification scale " + fmt(led.l_nominal) + " clamped to " + fmt(led.l_used));
  const double nu = params.K * sqrt_d0 / sqrt_d1 * s_q.lambda;
  led.diagnostics["nu"] = nu;
  led.diagnostics["nu_times_l"] = nu * led.l_nominal;

  // Nominal frequency ladder, kept for the record.
  try {
    const MuLadder nominal = mu_ladder(params, q, led.l_nominal);
    led.mu_nominal = nominal.mu;
    led.diagnostics["ladder_log_margin"] = nominal.log_margin;
    led.diagnostics["ladder_step_ratio"] = nominal.step_ratio;
    if (!nominal.admissible) led.warnings.push_back("nominal top frequency fails the admissibility bound");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::schedule_infeasible) throw;
    led.warnings.push_back(std::string("nominal ladder unusable: ") + e.what());
  }

  const double cap = realization.mu_cap(g);
  if (s_1.lambda > cap)
    led.warnings.push_back("frequency cap: lambda_" + std::to_string(q + 1) + " = " + fmt(s_1.lambda) +
                           " exceeds the grid cap " + fmt(cap));
  const double top = std::min(s_1.lambda, cap);
  led.mu_used = realize_ladder(n, realization.mu_floor, top);

  // Mollified data and deficit.
  const Mollifier mol(g, led.l_used);
  const MatrixField a_tilde = mol.apply(target);
  const ScalarJet v_tilde = mollify_jet(mol, state.v);
  const VectorJet w_tilde = mollify_jet(mol, state.w);
  const MatrixField k_tilde = mol.apply(state.kernel);
  const MatrixField d_tilde = compute_deficit(a_tilde, v_tilde, w_tilde, k_tilde, delta2);
  {
    MatrixField shifted = d_tilde;
    shifted.add_identity(-delta1);
    record("mollified_deficit", "intermediate", holder_norm0(shifted, params.alpha), 3.0 * params.sigma * delta1);
  }

  // Diagonalize D~ / delta_{q+1}.
  MatrixField h_mat = d_tilde;
  h_mat *= 1.0 / delta1;
  DiagonalizeOptions dopt;
  dopt.alpha = params.alpha;
  dopt.sigma_tilde = realization.sigma_tilde;
  dopt.record_schauder = false;
  const DiagonalizationResult diag = diagonalize(h_mat, dopt);
  led.diagnostics["diagonal_input_distance"] = diag.input_distance;
  led.diagnostics["diagonal_min_amplitude"] = diag.min_amplitude;

  MatrixField kernel_next = k_tilde;
  {
    MatrixField scaled = diag.kernel;
    scaled *= delta1;
    kernel_next -= scaled;
  }

  // Corrugate in every direction.
  ScalarJet v_hat = v_tilde;
  VectorJet w_hat = w_tilde;
  MatrixField error_sum(g, n, natural_symmetry(mode));
  MatrixField squares(g, n, natural_symmetry(mode));
  for (int j = 0; j < n; ++j) {
    ScalarField amp = diag.amplitudes[j];
    amp *= sqrt_d1;
    PerturbedPair next = perturb_direction(v_hat, w_hat, amp, led.mu_used[j], j, mode);
    const MatrixField err = perturbation_error(v_hat, w_hat, next.v, next.w, amp, j, mode);
    const NormReport er = estimate_norm(err, 0, params.alpha);
    led.perturbation_sup.push_back(er.sup.at(0));
    led.perturbation_holder.push_back(er.holder_norm());
    error_sum += err;
    squares(j, j) += (amp * amp).real_part();
    v_hat = std::move(next.v);
    w_hat = std::move(next.w);
  }

  // Telescoping bookkeeping: Q(v^_n, w^_n) - Q(v~, w~) - sum d_j^2 e_j e_j = sum E_j.
  {
    MatrixField tele = quadratic_part(v_hat, w_hat, mode);
    tele -= quadratic_part(v_tilde, w_tilde, mode);
    tele -= squares;
    tele -= error_sum;
    led.diagnostics["telescoping_defect"] = tele.max_abs();
  }

  StageState& out = res.state;
  out.q = q + 1;
  out.v = std::move(v_hat);
  out.w = std::move(w_hat);
  out.kernel = std::move(kernel_next);
  out.deficit = compute_deficit(target, out.v, out.w, out.kernel, delta2);
  out.top_frequency = top;
  out.norms = measure_state(out.v, out.w, out.kernel, out.deficit, params.alpha);

  // The new deficit equals (A - A~) - sum E_j up to the diagonalization defect.
  {
    MatrixField predicted = target;
    predicted -= a_tilde;
    predicted -= error_sum;
    MatrixField gap = out.deficit;
    gap -= predicted;
    led.diagnostics["deficit_decomposition_defect"] = gap.max_abs();
    MatrixField moll_err = target;
    moll_err -= a_tilde;
    led.diagnostics["target_mollification_error"] = holder_norm0(moll_err, params.alpha);
  }

  // Conclusions.
  const ScalarJet dv = out.v - state.v;
  const VectorJet dw = out.w - state.w;
  const double dv1 = dv.value.interior_max_abs() + max_interior(dv.grad);
  const double dw1 = max_interior(dw.value) + [&] {
    double m = 0.0;
    for (const auto& row : dw.jac) m = std::max(m, max_interior(row));
    return m;
  }();
  record("c1_step_v", "conclusion", dv1, params.K * sqrt_d1);
  record("c1_step_w", "conclusion", dw1, params.K * sqrt_d1);
  record("c2_bound_next", "conclusion", out.norms.v2 + out.norms.w2 + out.norms.k1, params.K * sqrt_d1 * top);
  record("deficit_bound_next", "conclusion", out.norms.deficit_holder, params.sigma * delta2);
  led.diagnostics["c2_nominal_rhs"] = params.K * sqrt_d1 * s_1.lambda;
  led.diagnostics["step_v_sup"] = dv.value.interior_max_abs();

  if (realization.diagnostics) {
    const Battery battery = make_battery(g);
    led.diagnostics["kernel_residual"] = out.kernel.interior_max_abs() > 0.0 ? kernel_residual(out.kernel, battery) : 0.0;
    const MatrixField r_moll = mol.apply(rank_one(state.v.grad, mode));
    MatrixField comm = r_moll;
    comm -= rank_one(v_tilde.grad, mode);
    const double lhs = holder_norm0(comm, params.alpha);
    const double scale = in.v2 * in.v2 * std::pow(led.l_used, 2.0 - params.alpha);
    led.diagnostics["commutator_holder"] = lhs;
    led.diagnostics["commutator_constant"] = scale > 0.0 ? lhs / scale : 0.0;
  }
  return res;
}

}  // namespace s2hess
