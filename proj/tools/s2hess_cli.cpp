#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "s2hess/s2hess.h"

namespace {

using nlohmann::json;

// Owns a string returned by the library.
struct LibString {
  char* ptr = nullptr;
  ~LibString() { s2h_free_string(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int report_failure(const char* what, s2h_status st) {
  std::cerr << "error: " << what << ": " << s2h_status_string(st);
  const std::string detail = s2h_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << "\n";
  return st == S2H_INTERNAL ? 3 : 1;
}

void print_stage_summary(const json& report) {
  std::cout << "stages completed: " << report["stages_completed"] << " of " << report["stages_requested"] << "\n";
  for (const auto& s : report["stages"]) {
    const auto& ledger = s["ledger"];
    std::cout << "stage " << s["q"].get<int>() << "  ||D||_alpha = " << std::scientific << std::setprecision(3)
              << s["deficit_holder"].get<double>() << "  " << (ledger["all_pass"].get<bool>() ? "ledger ok" : "ledger FAIL")
              << "\n";
    for (const auto& e : ledger["entries"])
      std::cout << "    " << std::left << std::setw(20) << e["name"].get<std::string>() << std::setw(13)
                << e["kind"].get<std::string>() << std::right << std::setw(12) << e["lhs"].get<double>() << " <= "
                << std::setw(10) << e["rhs"].get<double>() << "  " << (e["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
    for (const auto& w : ledger["warnings"]) std::cout << "    warning: " << w.get<std::string>() << "\n";
  }
  const auto& v = report["verification"];
  std::cout << std::defaultfloat << "final definitional residual: " << v["definitional"]["max_residual"]
            << "\nfinal decomposition residual: " << v["decomposition_residual"] << "\n";
  if (!report["error"].get<std::string>().empty()) std::cout << "stopped: " << report["error"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-integration solver for the sigma_2 equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(s2h_version()));

  // run
  auto* run = app.add_subcommand("run", "Run the stage iteration and write outputs");
  std::string config_path, output_dir = "out/run", mode;
  int stages = 0, resolution = 0;
  run->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  run->add_option("--output", output_dir, "Output directory");
  run->add_option("--stages", stages, "Number of stages (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--mode", mode, "real or complex (overrides the config)")->check(CLI::IsMember({"real", "complex"}));
  run->add_option("--resolution", resolution, "Grid points per axis (overrides the config)");

  // verify
  auto* verify = app.add_subcommand("verify", "Recompute residuals from a run directory");
  std::string verify_dir;
  verify->add_option("--input", verify_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);

  // schedule
  auto* sched = app.add_subcommand("schedule", "Print the feasibility report of a schedule");
  s2h_schedule_params params;
  s2h_schedule_params_default(&params);
  std::string sched_mode = "complex", format = "text";
  int sched_stages = 0;
  sched->add_option("--n", params.n, "Complex or real dimension")->capture_default_str();
  sched->add_option("--p", params.p, "Integrability exponent of f")->capture_default_str();
  sched->add_option("--alpha", params.alpha, "Hoelder index")->capture_default_str();
  sched->add_option("--a", params.a, "Base of the sequences")->capture_default_str();
  sched->add_option("--b", params.b, "Growth exponent")->capture_default_str();
  sched->add_option("--c", params.c, "Frequency exponent")->capture_default_str();
  sched->add_option("--beta", params.beta, "Target regularity")->capture_default_str();
  sched->add_option("--sigma", params.sigma, "Deficit constant")->capture_default_str();
  sched->add_option("--stages", sched_stages, "Also check the amplitude step for this many stages");
  sched->add_option("--mode", sched_mode, "real or complex")->check(CLI::IsMember({"real", "complex"}))->capture_default_str();
  sched->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();

  // diagonalize
  auto* diag = app.add_subcommand("diagonalize", "Diagonalize a matrix-field dump by a kernel element");
  std::string diag_input, diag_output;
  double diag_alpha = 0.5, diag_sigma = 0.5;
  diag->add_option("--input", diag_input, "Matrix dump path <dir>/<name> (with or without .json)")->required();
  diag->add_option("--output", diag_output, "Directory for the kernel and amplitude dumps");
  diag->add_option("--alpha", diag_alpha, "Hoelder index")->capture_default_str();
  diag->add_option("--sigma-tilde", diag_sigma, "Closeness threshold for ||H - Id||_alpha")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    s2h_config* cfg = nullptr;
    s2h_status st = config_path.empty() ? s2h_config_from_json("{}", &cfg) : s2h_config_from_file(config_path.c_str(), &cfg);
    if (st != S2H_OK) return report_failure("config", st);
    std::unique_ptr<s2h_config, decltype(&s2h_config_free)> cfg_guard(cfg, s2h_config_free);
    if (stages > 0 && (st = s2h_config_set_stages(cfg, stages)) != S2H_OK) return report_failure("--stages", st);
    if (!mode.empty() && (st = s2h_config_set_mode(cfg, mode.c_str())) != S2H_OK) return report_failure("--mode", st);
    if (resolution > 0 && (st = s2h_config_set_resolution(cfg, resolution)) != S2H_OK)
      return report_failure("--resolution", st);

    s2h_run* handle = nullptr;
    const s2h_status run_status = s2h_run_execute(cfg, &handle);
    if (!handle) return report_failure("run", run_status);
    std::unique_ptr<s2h_run, decltype(&s2h_run_free)> run_guard(handle, s2h_run_free);
    if ((st = s2h_run_write(handle, output_dir.c_str())) != S2H_OK) return report_failure("write", st);
    LibString rep;
    if ((st = s2h_run_report_json(handle, &rep.ptr)) != S2H_OK) return report_failure("report", st);
    print_stage_summary(json::parse(rep.str()));
    std::cout << "outputs written to " << output_dir << "\n";
    return run_status == S2H_OK ? 0 : 2;
  }

  if (*verify) {
    LibString out;
    const s2h_status st = s2h_verify_directory(verify_dir.c_str(), &out.ptr);
    if (st != S2H_OK) return report_failure("verify", st);
    std::cout << out.str() << "\n";
    return 0;
  }

  if (*sched) {
    params.complex_mode = sched_mode == "complex" ? 1 : 0;
    s2h_schedule* s = nullptr;
    s2h_status st = s2h_schedule_create(&params, &s);
    if (st != S2H_OK) return report_failure("schedule", st);
    std::unique_ptr<s2h_schedule, decltype(&s2h_schedule_free)> guard(s, s2h_schedule_free);
    LibString out;
    if ((st = s2h_schedule_feasibility_json(s, sched_stages, &out.ptr)) != S2H_OK) return report_failure("schedule", st);
    const json rep = json::parse(out.str());
    double beta_max = 0.0, p_min = 0.0, kappa_min = 0.0;
    s2h_thresholds(params.n, params.complex_mode, &beta_max, &p_min, &kappa_min);
    if (format == "csv") {
      std::cout << std::setprecision(12) << "inequality,lhs,rhs,margin,pass\n";
      for (const auto& e : rep["entries"])
        std::cout << e["name"].get<std::string>() << ',' << e["lhs"].get<double>() << ',' << e["rhs"].get<double>() << ','
                  << e["margin"].get<double>() << ',' << (e["pass"].get<bool>() ? "true" : "false") << "\n";
    } else {
      std::cout << std::left << std::setw(24) << "inequality" << std::right << std::setw(14) << "lhs" << std::setw(14)
                << "rhs" << std::setw(14) << "margin" << "  result\n";
      std::cout << std::setprecision(6);
      for (const auto& e : rep["entries"])
        std::cout << std::left << std::setw(24) << e["name"].get<std::string>() << std::right << std::setw(14)
                  << e["lhs"].get<double>() << std::setw(14) << e["rhs"].get<double>() << std::setw(14)
                  << e["margin"].get<double>() << "  " << (e["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
      std::cout << "kappa = " << rep["kappa"].get<double>() << "; limits: beta < " << beta_max << ", p > " << p_min
                << ", kappa > " << kappa_min << "\n"
                << (rep["pass"].get<bool>() ? "schedule feasible" : "schedule NOT feasible") << "\n";
    }
    return rep["pass"].get<bool>() ? 0 : 4;
  }

  if (*diag) {
    std::filesystem::path p(diag_input);
    if (p.extension() == ".json" || p.extension() == ".bin") p.replace_extension();
    const std::string dir = p.parent_path().empty() ? "." : p.parent_path().string();
    LibString out;
    const s2h_status st = s2h_diagonalize_dump(dir.c_str(), p.filename().c_str(), diag_alpha, diag_sigma,
                                               diag_output.empty() ? nullptr : diag_output.c_str(), &out.ptr);
    if (st != S2H_OK) return report_failure("diagonalize", st);
    std::cout << out.str() << "\n";
    return 0;
  }
  return 0;
}
