#include "s2hess/s2hess.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "json.hpp"
#include "s2hess/diagonal.hpp"
#include "s2hess/io.hpp"
#include "s2hess/pipeline.hpp"
#include "s2hess/schedule.hpp"

struct s2h_config {
  s2hess::RunConfig config;
};

struct s2h_run {
  std::unique_ptr<s2hess::RunResult> result;
};

struct s2h_schedule {
  s2hess::ScheduleParams params;
};

namespace {

thread_local std::string g_last_error;

s2h_status record(s2h_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
s2h_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const s2hess::Error& e) {
    return record(static_cast<s2h_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(S2H_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(S2H_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

s2h_status null_arg(const char* what) { return record(S2H_NULL_ARGUMENT, std::string(what) + " must not be NULL"); }

}  // namespace

extern "C" {

const char* s2h_status_string(s2h_status status) {
  switch (status) {
    case S2H_OK:
      return "ok";
    case S2H_NULL_ARGUMENT:
      return "null argument";
    case S2H_INTERNAL:
      return "internal error";
    default:
      if (status >= S2H_INVALID_ARGUMENT && status <= S2H_PARSE)
        return s2hess::to_string(static_cast<s2hess::ErrorCode>(static_cast<int>(status)));
      return "unknown status";
  }
}

const char* s2h_last_error(void) { return g_last_error.c_str(); }

const char* s2h_version(void) { return s2hess::library_version(); }

void s2h_free_string(char* str) { std::free(str); }

s2h_status s2h_config_from_json(const char* json_text, s2h_config** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new s2h_config{s2hess::parse_config(json_text)};
    return S2H_OK;
  });
}

s2h_status s2h_config_from_file(const char* path, s2h_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new s2h_config{s2hess::parse_config(s2hess::read_text(path))};
    return S2H_OK;
  });
}

s2h_status s2h_config_set_stages(s2h_config* config, int stages) {
  if (!config) return null_arg("config");
  if (stages < 1) return record(S2H_INVALID_ARGUMENT, "stages must be at least 1");
  config->config.stages = stages;
  return S2H_OK;
}

s2h_status s2h_config_set_resolution(s2h_config* config, int points_per_axis) {
  if (!config) return null_arg("config");
  if (points_per_axis < 9) return record(S2H_INVALID_ARGUMENT, "resolution must be at least 9");
  config->config.resolution = points_per_axis;
  return S2H_OK;
}

s2h_status s2h_config_set_mode(s2h_config* config, const char* mode) {
  if (!config) return null_arg("config");
  if (!mode) return null_arg("mode");
  const std::string m(mode);
  if (m != "real" && m != "complex") return record(S2H_INVALID_ARGUMENT, "mode must be 'real' or 'complex'");
  config->config.mode = m == "real" ? s2hess::Ambient::real : s2hess::Ambient::complex;
  config->config.schedule.mode = config->config.mode;
  return S2H_OK;
}

s2h_status s2h_config_to_json(const s2h_config* config, char** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = duplicate(s2hess::config_to_json(config->config));
    return S2H_OK;
  });
}

void s2h_config_free(s2h_config* config) { delete config; }

s2h_status s2h_run_execute(const s2h_config* config, s2h_run** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto run = std::make_unique<s2h_run>();
    run->result = std::make_unique<s2hess::RunResult>(s2hess::run(config->config));
    const auto& rep = run->result->report;
    *out = run.release();
    if (rep.error_code != 0) return record(static_cast<s2h_status>(rep.error_code), rep.error_message);
    return S2H_OK;
  });
}

s2h_status s2h_run_write(const s2h_run* run, const char* directory) {
  if (!run) return null_arg("run");
  if (!directory) return null_arg("directory");
  return guarded([&] {
    s2hess::write_outputs(*run->result, directory);
    return S2H_OK;
  });
}

s2h_status s2h_run_report_json(const s2h_run* run, char** out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = duplicate(s2hess::report_to_json(run->result->report));
    return S2H_OK;
  });
}

int s2h_run_stages_completed(const s2h_run* run) {
  return run ? static_cast<int>(run->result->report.stages.size()) : -1;
}

void s2h_run_free(s2h_run* run) { delete run; }

s2h_status s2h_verify_directory(const char* directory, char** report_json) {
  if (!directory) return null_arg("directory");
  if (!report_json) return null_arg("report_json");
  return guarded([&] {
    *report_json = duplicate(s2hess::verification_to_json(s2hess::verify_directory(directory)));
    return S2H_OK;
  });
}

void s2h_schedule_params_default(s2h_schedule_params* params) {
  if (!params) return;
  const s2hess::ScheduleParams d;
  *params = {d.a, d.b, d.c, d.alpha, d.beta, d.sigma, d.K, d.C_prime, d.p, d.n, d.mode == s2hess::Ambient::complex};
}

s2h_status s2h_schedule_create(const s2h_schedule_params* params, s2h_schedule** out) {
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    s2hess::ScheduleParams p;
    p.a = params->a;
    p.b = params->b;
    p.c = params->c;
    p.alpha = params->alpha;
    p.beta = params->beta;
    p.sigma = params->sigma;
    p.K = params->K;
    p.C_prime = params->C_prime;
    p.p = params->p;
    p.n = params->n;
    p.mode = params->complex_mode ? s2hess::Ambient::complex : s2hess::Ambient::real;
    p.validate();
    *out = new s2h_schedule{p};
    return S2H_OK;
  });
}

s2h_status s2h_schedule_feasibility_json(const s2h_schedule* schedule, int stages, char** out) {
  if (!schedule) return null_arg("schedule");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto rep = s2hess::check_feasibility(schedule->params, stages);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : rep.entries)
      entries.push_back({{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"margin", e.margin}, {"pass", e.pass}});
    const nlohmann::json j{{"pass", rep.pass}, {"kappa", schedule->params.kappa()}, {"entries", entries}};
    *out = duplicate(j.dump(2));
    return S2H_OK;
  });
}

s2h_status s2h_schedule_feasible(const s2h_schedule* schedule, int stages, int* feasible) {
  if (!schedule) return null_arg("schedule");
  if (!feasible) return null_arg("feasible");
  return guarded([&] {
    *feasible = s2hess::check_feasibility(schedule->params, stages).pass ? 1 : 0;
    return S2H_OK;
  });
}

s2h_status s2h_schedule_sequences(const s2h_schedule* schedule, int q, double* log_delta, double* log_lambda) {
  if (!schedule) return null_arg("schedule");
  return guarded([&] {
    const auto s = s2hess::sequences(schedule->params, q);
    if (log_delta) *log_delta = s.log_delta;
    if (log_lambda) *log_lambda = s.log_lambda;
    return S2H_OK;
  });
}

void s2h_schedule_free(s2h_schedule* schedule) { delete schedule; }

s2h_status s2h_thresholds(int n, int complex_mode, double* beta_max, double* p_min, double* kappa_min) {
  return guarded([&] {
    const auto t = s2hess::thresholds(n, complex_mode ? s2hess::Ambient::complex : s2hess::Ambient::real);
    if (beta_max) *beta_max = t.beta_max;
    if (p_min) *p_min = t.p_min;
    if (kappa_min) *kappa_min = t.kappa_min;
    return S2H_OK;
  });
}

s2h_status s2h_diagonalize_dump(const char* input_dir, const char* name, double alpha, double sigma_tilde,
                                const char* output_dir, char** summary_json) {
  if (!input_dir) return null_arg("input_dir");
  if (!name) return null_arg("name");
  return guarded([&] {
    const s2hess::MatrixField h = s2hess::read_matrix(input_dir, name);
    s2hess::DiagonalizeOptions opt;
    opt.alpha = alpha;
    opt.sigma_tilde = sigma_tilde;
    const auto res = s2hess::diagonalize(h, opt);
    if (output_dir) {
      s2hess::write_matrix(output_dir, "kernel", res.kernel);
      for (std::size_t j = 0; j < res.amplitudes.size(); ++j)
        s2hess::write_field(output_dir, "amplitude_" + std::to_string(j + 1), res.amplitudes[j]);
    }
    if (summary_json) {
      s2hess::MatrixField sum = h;
      sum += res.kernel;
      nlohmann::json schauder = nlohmann::json::array();
      for (double r : res.schauder_ratios) schauder.push_back(std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr));
      const nlohmann::json j{{"input_distance", res.input_distance},
                             {"amplitude_ratio", res.amplitude_ratio},
                             {"kernel_ratio", res.kernel_ratio},
                             {"min_amplitude", res.min_amplitude},
                             {"offdiagonal_residual", sum.max_offdiag_abs()},
                             {"schauder_ratios", schauder}};
      *summary_json = duplicate(j.dump(2));
    }
    return S2H_OK;
  });
}

}  // extern "C"
