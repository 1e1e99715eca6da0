#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "s2hess/io.hpp"
#include "s2hess/pipeline.hpp"

using namespace s2hess;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

int parse_error_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  }
  return 0;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("s2hess_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config parsing") {
    const RunConfig d = parse_config("{}");
    CHECK(d.mode == Ambient::real);
    CHECK(d.n == 2);
    CHECK(d.resolution == 129);
    CHECK(d.effective_margin() == 8);

    const RunConfig c = parse_config(R"({"mode": "complex", "n": 2, "resolution": 24, "stages": 2,
      "f": {"kind": "trig", "offset": 1.0, "amplitude": 0.5, "modes": [1, 2]},
      "b": 1.2, "strict": false, "tolerances": {"telescoping": 1e-8}})");
    CHECK(c.mode == Ambient::complex);
    CHECK(c.resolution == 24);
    CHECK(c.effective_margin() == 4);
    CHECK(c.f.kind == "trig");
    CHECK(c.f.modes == std::vector<int>{1, 2});
    CHECK(c.schedule.b == 1.2);
    CHECK(c.schedule.mode == Ambient::complex);
    CHECK_FALSE(c.realization.strict);
    CHECK(c.tolerances.telescoping == 1e-8);
    CHECK(c.tolerances.decomposition == 1e-9);

    CHECK(parse_error_code(R"({"resolutoin": 65})") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"({"f": {"kind": "trig", "mode": [1]}})") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"({"f": {"kind": "noise"}})") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"({"f": {"kind": "file"}})") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"({"mode": "quaternion"})") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"({"tolerances": {"kernel": 1}})") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"({"n": 2,)") == static_cast<int>(ErrorCode::parse));
    CHECK(parse_error_code(R"([1, 2])") == static_cast<int>(ErrorCode::parse));
  }

  TEST_CASE("config round trip") {
    RunConfig c;
    c.mode = Ambient::complex;
    c.resolution = 20;
    c.margin = 3;
    c.u_flat = {"trig", 0.0, 0.1, 0.2, {1, 0, 1}, ""};
    c.schedule.a = 50;
    c.schedule.sigma = 0.4;
    c.realization.l_max = 0.2;
    c.tolerances.kernel_residual = 0.07;
    const RunConfig back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.u_flat.modes == c.u_flat.modes);
    CHECK(back.u_flat.amplitude == 0.2);
    CHECK(back.schedule.a == 50);
    CHECK(back.margin == 3);
    CHECK(back.realization.l_max == 0.2);
  }

  TEST_CASE("trig generator jets") {
    Grid g(Ambient::real, 2, 65, 4);
    const GeneratorSpec spec{"trig", 0.0, 0.3, 2.0, {1, 2}, ""};
    const ScalarJet jet = generate_jet(spec, g);
    const ScalarField expect = ScalarField::sample(g, [](std::span<const double> x) {
      return 0.3 + 2.0 * std::sin(pi * x[0]) * std::sin(2 * pi * x[1]);
    });
    CHECK((jet.value - expect).max_abs() <= 1e-14);
    // Hessian entry (0,1) in closed form.
    const ScalarField mixed = ScalarField::sample(g, [](std::span<const double> x) {
      return 2.0 * pi * std::cos(pi * x[0]) * 2 * pi * std::cos(2 * pi * x[1]);
    });
    CHECK((jet.hess_at(0, 1) - mixed).max_abs() <= 1e-12);
    const ScalarJet fd = ScalarJet::from_field(jet.value);
    const double h = g.spacing();
    // Central difference truncation: h^2/6 |f'''| and h^2/12 |f''''| along each axis.
    for (int a = 0; a < 2; ++a) {
      const double k = pi * spec.modes[a];
      CHECK((fd.grad[a] - jet.grad[a]).interior_max_abs() <= 1.05 * h * h / 6 * 2.0 * k * k * k);
      CHECK((fd.hess_at(a, a) - jet.hess_at(a, a)).interior_max_abs() <= 1.05 * h * h / 12 * 2.0 * k * k * k * k);
    }
    // Axes without a mode contribute a factor 1.
    const ScalarJet flat = generate_jet({"trig", 0.0, 0.0, 1.5, {}, ""}, g);
    CHECK((flat.value - ScalarField(g, 1.5)).max_abs() == 0.0);
    CHECK(flat.grad[0].max_abs() == 0.0);
    CHECK((generate({"constant", 2.5, 0.0, 1.0, {}, ""}, g) - ScalarField(g, 2.5)).max_abs() == 0.0);
  }

  TEST_CASE("file generator") {
    const fs::path dir = scratch_dir("gen");
    Grid g(Ambient::real, 2, 17);
    const ScalarField src = generate({"trig", 0.0, 1.0, 1.0, {1, 1}, ""}, g);
    fs::create_directories(dir);
    write_field(dir, "src", src);
    const ScalarField back = generate({"file", 0.0, 0.0, 1.0, {}, (dir / "src").string()}, g);
    CHECK((back - src).max_abs() == 0.0);
    Grid other(Ambient::real, 2, 33);
    CHECK_THROWS_AS(generate({"file", 0.0, 0.0, 1.0, {}, (dir / "src").string()}, other), Error);
    fs::remove_all(dir);
  }

  TEST_CASE("problem setup") {
    RunConfig c;
    c.resolution = 65;
    c.f = {"trig", 0.0, 1.0, 0.5, {1, 1}, ""};
    const ProblemSetup s = setup_problem(c);
    CHECK(s.strong_residual <= 1e-9);
    CHECK(s.tau > 100.0);
    const double delta1 = sequences(c.schedule, 1).delta;
    MatrixField expect = s.target;
    expect *= delta1 / s.tau;
    CHECK((expect - s.scaled_target).max_abs() <= 1e-15);
    // A = (u + tau) Id with tau dominating, so A is close to tau Id.
    CHECK(s.target(0, 1).max_abs() == 0.0);
    CHECK((s.target(0, 0) - s.target(1, 1)).max_abs() == 0.0);
    CHECK(s.initial.norms.deficit_sup < delta1);

    RunConfig bad = c;
    bad.schedule.p = 1.0;
    CHECK_THROWS_AS(setup_problem(bad), Error);
  }

  TEST_CASE("small run, outputs and re-verification") {
    RunConfig c;
    c.resolution = 65;
    c.stages = 2;
    c.f = {"trig", 0.0, 1.0, 0.5, {1, 1}, ""};
    const RunResult r = run(c);
    const RunReport& rep = r.report;
    CHECK(rep.stages_requested == 2);
    REQUIRE(rep.stages.size() >= 1);
    CHECK(rep.completed == (rep.stages.size() == 2));
    CHECK((rep.error_code == 0) == rep.completed);
    CHECK(rep.feasibility.entries.size() > 0);
    CHECK(rep.stages[0].delta == doctest::Approx(sequences(c.schedule, 1).delta));
    CHECK(rep.closeness <= rep.closeness_bound);
    CHECK(std::isfinite(rep.verification.decomposition_residual));
    CHECK(rep.verification.definitional.residuals.size() > 0);

    const fs::path dir = scratch_dir("run");
    write_outputs(r, dir);
    for (const char* f : {"metadata.json", "report.json", "convergence.csv", "ledger_stage_0.json"})
      CHECK(fs::exists(dir / f));
    std::ifstream csv(dir / "convergence.csv");
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 2 + static_cast<int>(rep.stages.size()));

    const Verification again = verify_directory(dir);
    const Verification& orig = rep.verification;
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    CHECK(close(again.decomposition_residual, orig.decomposition_residual));
    CHECK(close(again.kernel_residual_k, orig.kernel_residual_k));
    CHECK(close(again.kernel_residual_herm, orig.kernel_residual_herm));
    CHECK(close(again.definitional.max_residual, orig.definitional.max_residual));
    CHECK(report_to_json(rep).find("\"stages_completed\"") != std::string::npos);
    fs::remove_all(dir);
    CHECK_THROWS_AS(verify_directory(dir), Error);

    RunConfig none = c;
    none.stages = 0;
    CHECK_THROWS_AS(run(none), Error);
  }
}
