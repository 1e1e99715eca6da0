#include "s2hess/pipeline.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "s2hess/corrugation.hpp"
#include "s2hess/io.hpp"
#include "s2hess/norms.hpp"
#include "s2hess/poisson.hpp"

namespace s2hess {
namespace fs = std::filesystem;
using nlohmann::json;

const char* library_version() noexcept { return "0.1.0"; }

// ---------------------------------------------------------------- generators

namespace {

constexpr double kPi = std::numbers::pi;

int mode_of(const GeneratorSpec& spec, int axis) {
  return axis < static_cast<int>(spec.modes.size()) ? spec.modes[axis] : 0;
}

ScalarField load_file_source(const GeneratorSpec& spec, const Grid& grid) {
  const fs::path p(spec.path);
  ScalarField raw = read_field(p.parent_path(), p.filename().string());
  require(raw.grid().same_shape(grid), ErrorCode::invalid_argument,
          "generator file " + spec.path + " does not match the grid");
  return ScalarField(grid, raw.values());
}

}  // namespace

ScalarField generate(const GeneratorSpec& spec, const Grid& grid) {
  if (spec.kind == "file") return load_file_source(spec, grid);
  return generate_jet(spec, grid).value;
}

ScalarJet generate_jet(const GeneratorSpec& spec, const Grid& grid) {
  if (spec.kind == "file") return ScalarJet::from_field(load_file_source(spec, grid));
  ScalarJet jet(grid);
  if (spec.kind == "constant") {
    jet.value += spec.value;
    return jet;
  }
  require(spec.kind == "trig", ErrorCode::parse, "unknown generator kind '" + spec.kind + "'");
  const int d = grid.dims();
  const double h = grid.spacing();
  std::vector<double> s(d), c(d), k(d);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < d; ++a) {
      const int m = mode_of(spec, a);
      k[a] = kPi * m;
      const double x = grid.coord(p, a) * h;
      s[a] = m == 0 ? 1.0 : std::sin(k[a] * x);
      c[a] = m == 0 ? 0.0 : std::cos(k[a] * x);
    }
    // Product of the per-axis factors with up to two of them differentiated.
    auto prod = [&](int skip1, int skip2) {
      double r = spec.amplitude;
      for (int a = 0; a < d; ++a)
        if (a != skip1 && a != skip2) r *= s[a];
      return r;
    };
    jet.value[p] = spec.offset + prod(-1, -1);
    for (int a = 0; a < d; ++a) {
      jet.grad[a][p] = k[a] * c[a] * prod(a, -1);
      for (int b = 0; b < d; ++b)
        jet.hess[a * d + b][p] = a == b ? -k[a] * k[a] * s[a] * prod(a, -1) : k[a] * c[a] * k[b] * c[b] * prod(a, b);
    }
  }
  return jet;
}

// -------------------------------------------------------------------- config

int RunConfig::effective_margin() const { return margin >= 0 ? margin : std::max(4, resolution / 16); }

Grid RunConfig::grid() const { return Grid(mode, n, resolution, effective_margin()); }

namespace {

GeneratorSpec parse_generator(const json& j, const std::string& key) {
  GeneratorSpec g;
  if (j.is_number()) {
    g.kind = "constant";
    g.value = j.get<double>();
    return g;
  }
  require(j.is_object(), ErrorCode::parse, key + ": generator must be a number or an object");
  for (const auto& [k, _] : j.items())
    require(k == "kind" || k == "value" || k == "offset" || k == "amplitude" || k == "modes" || k == "path",
            ErrorCode::parse, key + ": unknown generator key '" + k + "'");
  g.kind = j.value("kind", std::string("constant"));
  g.value = j.value("value", 0.0);
  g.offset = j.value("offset", 0.0);
  g.amplitude = j.value("amplitude", 1.0);
  g.modes = j.value("modes", std::vector<int>{});
  g.path = j.value("path", std::string());
  require(g.kind == "constant" || g.kind == "trig" || g.kind == "file", ErrorCode::parse,
          key + ": unknown generator kind '" + g.kind + "'");
  require(g.kind != "file" || !g.path.empty(), ErrorCode::parse, key + ": file generator needs a path");
  return g;
}

json generator_json(const GeneratorSpec& g) {
  json j{{"kind", g.kind}};
  if (g.kind == "constant") j["value"] = g.value;
  if (g.kind == "trig") {
    j["offset"] = g.offset;
    j["amplitude"] = g.amplitude;
    j["modes"] = g.modes;
  }
  if (g.kind == "file") j["path"] = g.path;
  return j;
}

Ambient parse_mode(const std::string& s) {
  if (s == "real") return Ambient::real;
  if (s == "complex") return Ambient::complex;
  fail(ErrorCode::parse, "mode must be 'real' or 'complex', got '" + s + "'");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("config: ") + e.what());
  }
  require(j.is_object(), ErrorCode::parse, "config: top level must be an object");
  static const std::set<std::string> known{
      "mode", "n", "resolution", "margin", "f", "u_flat", "p", "epsilon", "a", "b", "c", "alpha", "beta",
      "sigma", "K", "C_prime", "C_mu", "C_l", "stages", "tolerances", "sigma_tilde", "mu_cap_factor",
      "mu_floor", "l_min_cells", "l_max", "strict", "diagnostics"};
  for (const auto& [k, _] : j.items()) require(known.count(k) > 0, ErrorCode::parse, "config: unknown key '" + k + "'");

  RunConfig c;
  try {
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    c.n = j.value("n", c.n);
    c.resolution = j.value("resolution", c.resolution);
    c.margin = j.value("margin", c.margin);
    if (j.contains("f")) c.f = parse_generator(j["f"], "f");
    if (j.contains("u_flat")) c.u_flat = parse_generator(j["u_flat"], "u_flat");
    c.epsilon = j.value("epsilon", c.epsilon);
    c.stages = j.value("stages", c.stages);
    ScheduleParams& s = c.schedule;
    s.p = j.value("p", s.p);
    s.a = j.value("a", s.a);
    s.b = j.value("b", s.b);
    s.c = j.value("c", s.c);
    s.alpha = j.value("alpha", s.alpha);
    s.beta = j.value("beta", s.beta);
    s.sigma = j.value("sigma", s.sigma);
    s.K = j.value("K", s.K);
    s.C_prime = j.value("C_prime", s.C_prime);
    s.C_mu = j.value("C_mu", s.C_mu);
    s.C_l = j.value("C_l", s.C_l);
    GridRealization& r = c.realization;
    r.sigma_tilde = j.value("sigma_tilde", r.sigma_tilde);
    r.cap_factor = j.value("mu_cap_factor", r.cap_factor);
    r.mu_floor = j.value("mu_floor", r.mu_floor);
    r.l_min_cells = j.value("l_min_cells", r.l_min_cells);
    r.l_max = j.value("l_max", r.l_max);
    r.strict = j.value("strict", r.strict);
    r.diagnostics = j.value("diagnostics", r.diagnostics);
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      require(t.is_object(), ErrorCode::parse, "config: tolerances must be an object");
      for (const auto& [k, _] : t.items())
        require(k == "kernel_residual" || k == "telescoping" || k == "decomposition", ErrorCode::parse,
                "config: unknown tolerance '" + k + "'");
      c.tolerances.kernel_residual = t.value("kernel_residual", c.tolerances.kernel_residual);
      c.tolerances.telescoping = t.value("telescoping", c.tolerances.telescoping);
      c.tolerances.decomposition = t.value("decomposition", c.tolerances.decomposition);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("config: ") + e.what());
  }
  c.schedule.n = c.n;
  c.schedule.mode = c.mode;
  require(c.n >= 2, ErrorCode::invalid_argument, "config: n must be at least 2");
  require(c.resolution >= 9, ErrorCode::invalid_argument, "config: resolution must be at least 9");
  require(c.stages >= 0, ErrorCode::invalid_argument, "config: stages must be nonnegative");
  c.schedule.validate();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  const ScheduleParams& s = c.schedule;
  const GridRealization& r = c.realization;
  json j{{"mode", to_string(c.mode)},
         {"n", c.n},
         {"resolution", c.resolution},
         {"margin", c.effective_margin()},
         {"f", generator_json(c.f)},
         {"u_flat", generator_json(c.u_flat)},
         {"p", s.p},
         {"epsilon", c.epsilon},
         {"a", s.a},
         {"b", s.b},
         {"c", s.c},
         {"alpha", s.alpha},
         {"beta", s.beta},
         {"sigma", s.sigma},
         {"K", s.K},
         {"C_prime", s.C_prime},
         {"C_mu", s.C_mu},
         {"C_l", s.C_l},
         {"stages", c.stages},
         {"sigma_tilde", r.sigma_tilde},
         {"mu_cap_factor", r.cap_factor},
         {"mu_floor", r.mu_floor},
         {"l_min_cells", r.l_min_cells},
         {"l_max", r.l_max},
         {"strict", r.strict},
         {"diagnostics", r.diagnostics},
         {"tolerances",
          {{"kernel_residual", c.tolerances.kernel_residual},
           {"telescoping", c.tolerances.telescoping},
           {"decomposition", c.tolerances.decomposition}}}};
  return j.dump(2);
}

// --------------------------------------------------------------------- setup

namespace {

double jet_c2(const ScalarJet& j) {
  double g = 0.0, h = 0.0;
  for (const auto& f : j.grad) g = std::max(g, f.interior_max_abs());
  for (const auto& f : j.hess) h = std::max(h, f.interior_max_abs());
  return j.value.interior_max_abs() + g + h;
}

ScalarJet scaled(ScalarJet j, double s) {
  j *= s;
  return j;
}

}  // namespace

ProblemSetup setup_problem(const RunConfig& config) {
  const Grid grid = config.grid();
  const ScheduleParams& sp = config.schedule;
  sp.validate();

  ScalarField f = generate(config.f, grid);
  require(f.real_flag(), ErrorCode::invalid_argument, "setup: f must be real-valued");
  f = f.real_part();
  const int n = config.n;
  const double scale = config.mode == Ambient::complex ? -(n - 1) / 4.0 : -(n - 1.0);
  ScalarField u = solve_dirichlet(f, scale).real_part();

  const Symmetry sym = natural_symmetry(config.mode);
  MatrixField u_id = MatrixField::scalar_identity(u, sym);
  ScalarField strong = trace_curlcurl_strong(u_id);
  strong *= -1.0;
  strong -= f;

  const double kappa = sp.kappa();
  require(kappa > 0.0, ErrorCode::invalid_exponent, "setup: p too small, the Hoelder exponent 2 - n/p is not positive");
  const int k = static_cast<int>(std::floor(kappa));
  const double frac = kappa - k;
  const double u_kappa =
      frac < 1e-12 ? estimate_norm(u, k, 0.5).ck_norm() : estimate_norm(u, k, frac).holder_norm();

  ScalarJet u_flat = generate_jet(config.u_flat, grid);
  require(u_flat.value.real_flag(), ErrorCode::invalid_argument, "setup: the target function must be real-valued");
  const double c2 = jet_c2(u_flat);
  const double tau = (sp.K + 1.0 / sp.sigma) * (u_kappa + c2 * c2 + 100.0);

  ScalarField shifted = u;
  shifted += tau;
  MatrixField target = MatrixField::scalar_identity(shifted, sym);
  const double delta1 = sequences(sp, 1).delta;
  MatrixField scaled_target = target;
  scaled_target *= delta1 / tau;

  const ScalarJet v0 = scaled(u_flat, std::sqrt(delta1 / tau));
  const VectorJet w0(grid, n);
  const double top = std::min(sequences(sp, 0).lambda, config.realization.mu_cap(grid));
  StageState initial = initial_state(scaled_target, v0, w0, sp, top);

  return ProblemSetup{grid,   f,     std::move(u), std::move(u_flat), std::move(target), std::move(scaled_target),
                      tau,    u_kappa, c2,         strong.interior_max_abs(), std::move(initial)};
}

// ---------------------------------------------------------------------- run

Verification verify_solution(const ScalarJet& v, const VectorJet& w, const MatrixField& kernel,
                             const MatrixField& target, const ScalarField& f, const Battery& battery) {
  const Ambient mode = target.grid().kind();
  Verification out;
  MatrixField gap = quadratic_part(v, w, mode);
  gap += kernel;
  gap -= target;
  out.decomposition_residual = gap.interior_max_abs();
  out.kernel_residual_k = kernel_residual(kernel, battery);
  out.kernel_residual_herm = kernel_residual(herm_from_jacobian(w.jac, mode), battery);
  out.definitional = very_weak_s2(v.grad, f, battery, mode);
  return out;
}

namespace {

double definitional_residual(const ScalarJet& v, double rescale, const ScalarField& f, const Battery& battery,
                             Ambient mode) {
  std::vector<ScalarField> grad = v.grad;
  for (auto& g : grad) g *= rescale;
  return very_weak_s2(grad, f, battery, mode).max_residual;
}

double sup_over(const std::vector<ScalarField>& fs) {
  double m = 0.0;
  for (const auto& f : fs) m = std::max(m, f.interior_max_abs());
  return m;
}

}  // namespace

RunResult run(const RunConfig& config) {
  require(config.stages >= 1, ErrorCode::invalid_argument, "run: at least one stage is required");
  const auto t_start = std::chrono::steady_clock::now();
  const ScheduleParams& sp = config.schedule;

  ProblemSetup prepared = setup_problem(config);
  StageState first = prepared.initial;
  const Grid g0 = prepared.grid;
  RunResult res{config, std::move(prepared), std::move(first), ScalarJet(g0), VectorJet(g0, config.n),
                MatrixField(g0, config.n, natural_symmetry(config.mode)), {}};
  RunReport& rep = res.report;
  const ProblemSetup& setup = res.setup;
  const Grid& grid = setup.grid;
  rep.stages_requested = config.stages;
  rep.tau = setup.tau;
  rep.strong_residual = setup.strong_residual;
  rep.feasibility = check_feasibility(sp, config.stages);
  rep.initial_deficit_holder = setup.initial.norms.deficit_holder;

  const double delta1 = sequences(sp, 1).delta;
  const double rescale_v = std::sqrt(setup.tau / delta1);
  const double rescale_w = setup.tau / delta1;
  const Battery battery = make_battery(grid);
  rep.initial_definitional_residual = definitional_residual(setup.initial.v, rescale_v, setup.f, battery, config.mode);

  StageState state = res.state;
  for (int q = 0; q < config.stages; ++q) {
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<StageResult> attempt;
    try {
      attempt.emplace(run_stage(state, sp, setup.scaled_target, config.realization));
    } catch (const Error& e) {
      rep.error_code = static_cast<int>(e.code());
      rep.error_message = e.what();
      break;
    }
    StageResult& sr = *attempt;
    StageRecord rec;
    rec.delta = sequences(sp, q + 1).delta;
    rec.lambda = sequences(sp, q + 1).lambda;
    rec.deficit_holder = sr.state.norms.deficit_holder;
    rec.deficit_sup = sr.state.norms.deficit_sup;
    const ScalarJet dv = sr.state.v - state.v;
    const double n1 = dv.value.interior_max_abs() + sup_over(dv.grad);
    const double n2 = n1 + sup_over(dv.hess);
    rec.cauchy_increment = std::pow(n1, 1.0 - sp.beta) * std::pow(n2, sp.beta);
    rec.cauchy_bound = sp.K * std::sqrt(rec.delta) * std::pow(sr.state.top_frequency, sp.beta);
    rec.definitional_residual = definitional_residual(sr.state.v, rescale_v, setup.f, battery, config.mode);
    const auto it = sr.ledger.diagnostics.find("kernel_residual");
    rec.kernel_residual = it != sr.ledger.diagnostics.end() ? it->second : 0.0;
    rec.ledger = std::move(sr.ledger);
    state = std::move(sr.state);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.stages.push_back(std::move(rec));
  }
  rep.completed = static_cast<int>(rep.stages.size()) == config.stages;

  // Closeness in scaled units against the sum of the step bounds.
  {
    const ScalarField moved = state.v.value - setup.initial.v.value;
    rep.closeness = moved.interior_max_abs();
    for (std::size_t q = 0; q < rep.stages.size(); ++q) rep.closeness_bound += sp.K * std::sqrt(rep.stages[q].delta);
  }

  res.v = state.v;
  res.v *= rescale_v;
  res.w = state.w;
  res.w *= rescale_w;
  res.kernel = state.kernel;
  res.kernel *= rescale_w;
  res.state = std::move(state);
  rep.distance_to_target = (res.v.value - setup.u_flat.value).interior_max_abs();
  rep.verification = verify_solution(res.v, res.w, res.kernel, setup.target, setup.f, battery);
  rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

// ------------------------------------------------------------------- output

namespace {

json ledger_json(const StageLedger& l) {
  json entries = json::array();
  for (const auto& e : l.entries)
    entries.push_back({{"name", e.name}, {"kind", e.kind}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"pass", e.pass}});
  json diag = json::object();
  for (const auto& [k, v] : l.diagnostics) diag[k] = std::isfinite(v) ? json(v) : json(nullptr);
  return {{"q", l.q},
          {"entries", entries},
          {"all_pass", l.all_pass()},
          {"warnings", l.warnings},
          {"diagnostics", diag},
          {"l_nominal", l.l_nominal},
          {"l_used", l.l_used},
          {"mu_nominal", l.mu_nominal},
          {"mu_used", l.mu_used},
          {"perturbation_sup", l.perturbation_sup},
          {"perturbation_holder", l.perturbation_holder}};
}

json weak_json(const WeakResidualReport& r) {
  return {{"pairings", r.pairings},
          {"rhs", r.rhs},
          {"residuals", r.residuals},
          {"max_residual", r.max_residual},
          {"rms_residual", r.rms_residual}};
}

json verification_json(const Verification& v) {
  return {{"decomposition_residual", v.decomposition_residual},
          {"kernel_residual_k", v.kernel_residual_k},
          {"kernel_residual_herm", v.kernel_residual_herm},
          {"definitional", weak_json(v.definitional)}};
}

json report_json(const RunReport& r) {
  json feas = json::array();
  for (const auto& e : r.feasibility.entries)
    feas.push_back({{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"margin", e.margin}, {"pass", e.pass}});
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"q", s.ledger.q},
                      {"delta_next", s.delta},
                      {"lambda_next", s.lambda},
                      {"deficit_holder", s.deficit_holder},
                      {"deficit_sup", s.deficit_sup},
                      {"cauchy_increment", s.cauchy_increment},
                      {"cauchy_bound", s.cauchy_bound},
                      {"definitional_residual", s.definitional_residual},
                      {"kernel_residual", s.kernel_residual},
                      {"seconds", s.seconds},
                      {"ledger", ledger_json(s.ledger)}});
  return {{"version", library_version()},
          {"stages_requested", r.stages_requested},
          {"stages_completed", r.stages.size()},
          {"completed", r.completed},
          {"error_code", r.error_code},
          {"error", r.error_message},
          {"feasibility", {{"pass", r.feasibility.pass}, {"entries", feas}}},
          {"tau", r.tau},
          {"setup_strong_residual", r.strong_residual},
          {"initial_deficit_holder", r.initial_deficit_holder},
          {"initial_definitional_residual", r.initial_definitional_residual},
          {"stages", stages},
          {"closeness", r.closeness},
          {"closeness_bound", r.closeness_bound},
          {"distance_to_target", r.distance_to_target},
          {"verification", verification_json(r.verification)},
          {"total_seconds", r.total_seconds}};
}

}  // namespace

std::string report_to_json(const RunReport& report) { return report_json(report).dump(2); }
std::string ledger_to_json(const StageLedger& ledger) { return ledger_json(ledger).dump(2); }
std::string verification_to_json(const Verification& v) { return verification_json(v).dump(2); }

void write_outputs(const RunResult& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "fields", ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + dir.string());

  json meta{{"config", json::parse(config_to_json(result.config))},
            {"version", library_version()},
            {"fftw", std::string(fftw_version)},
            {"compiler", std::string(__VERSION__)}};
  write_text(dir / "metadata.json", meta.dump(2) + "\n");

  const RunReport& rep = result.report;
  for (const auto& s : rep.stages)
    write_text(dir / ("ledger_stage_" + std::to_string(s.ledger.q) + ".json"), ledger_to_json(s.ledger) + "\n");

  const fs::path fd = dir / "fields";
  write_field(fd, "v", result.v.value);
  write_vector(fd, "v_grad", result.v.grad);
  write_vector(fd, "w", result.w.value);
  std::vector<ScalarField> jac;
  for (const auto& row : result.w.jac)
    for (const auto& d : row) jac.push_back(d);
  write_vector(fd, "w_jac", jac);
  write_matrix(fd, "kernel", result.kernel);
  write_matrix(fd, "deficit_scaled", result.state.deficit);
  write_matrix(fd, "target", result.setup.target);
  write_field(fd, "f", result.setup.f);
  write_field(fd, "u_flat", result.setup.u_flat.value);

  std::ostringstream csv;
  csv.precision(10);
  csv << "q,delta_q,lambda_q,deficit_holder,cauchy_increment,definitional_residual,kernel_residual\n";
  const auto s0 = sequences(result.config.schedule, 0);
  csv << 0 << ',' << s0.delta << ',' << s0.lambda << ',' << rep.initial_deficit_holder << ",," << rep.initial_definitional_residual
      << ",\n";
  for (const auto& s : rep.stages)
    csv << s.ledger.q + 1 << ',' << s.delta << ',' << s.lambda << ',' << s.deficit_holder << ',' << s.cauchy_increment
        << ',' << s.definitional_residual << ',' << s.kernel_residual << '\n';
  write_text(dir / "convergence.csv", csv.str());
  write_text(dir / "report.json", report_to_json(rep) + "\n");
}

Verification verify_directory(const fs::path& dir) {
  const fs::path fd = dir / "fields";
  ScalarField v = read_field(fd, "v");
  const Grid& g = v.grid();
  ScalarJet vj(g);
  vj.value = v;
  vj.grad = read_vector(fd, "v_grad");
  const std::vector<ScalarField> jac = read_vector(fd, "w_jac");
  const int n = g.n(), d = g.dims();
  require(static_cast<int>(jac.size()) == n * d && static_cast<int>(vj.grad.size()) == d, ErrorCode::io,
          "verify: dump shapes do not match the grid");
  VectorJet wj(g, n);
  wj.value = read_vector(fd, "w");
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) wj.jac[i][a] = jac[i * d + a];
  const MatrixField kernel = read_matrix(fd, "kernel");
  const MatrixField target = read_matrix(fd, "target");
  const ScalarField f = read_field(fd, "f");
  return verify_solution(vj, wj, kernel, target, f, make_battery(g));
}

}  // namespace s2hess
