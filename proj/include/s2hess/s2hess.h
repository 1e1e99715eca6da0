#ifndef S2HESS_S2HESS_H
#define S2HESS_S2HESS_H

/*
 * C interface to the s2hess solver library.
 *
 * Every fallible call returns an s2h_status. On failure a thread-local
 * message is available from s2h_last_error() until the next call on the same
 * thread. Strings returned through char** out-parameters are owned by the
 * caller and must be released with s2h_free_string().
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(S2HESS_BUILDING)
#define S2H_API __attribute__((visibility("default")))
#else
#define S2H_API
#endif

typedef enum s2h_status {
  S2H_OK = 0,
  S2H_INVALID_ARGUMENT = 1,
  S2H_UNSUPPORTED_ORDER = 2,
  S2H_WRONG_AMBIENT = 3,
  S2H_UNDER_RESOLVED_MOLLIFIER = 4,
  S2H_INVALID_EXPONENT = 5,
  S2H_SUPPORT_VIOLATION = 6,
  S2H_EMPTY_BATTERY = 7,
  S2H_DIMENSION_UNSUPPORTED = 8,
  S2H_UNDEFINED_RATIO = 9,
  S2H_TOO_FAR_FROM_IDENTITY = 10,
  S2H_DIAGONALIZATION_FAILED = 11,
  S2H_HYPOTHESIS_VIOLATION = 12,
  S2H_SCHEDULE_INFEASIBLE = 13,
  S2H_OVERFLOW = 14,
  S2H_IO = 15,
  S2H_PARSE = 16,
  S2H_NULL_ARGUMENT = 90,
  S2H_INTERNAL = 99
} s2h_status;

S2H_API const char* s2h_status_string(s2h_status status);
S2H_API const char* s2h_last_error(void);
S2H_API const char* s2h_version(void);
S2H_API void s2h_free_string(char* str);

/* ---- run configuration ---------------------------------------------- */

typedef struct s2h_config s2h_config;

S2H_API s2h_status s2h_config_from_json(const char* json_text, s2h_config** out);
S2H_API s2h_status s2h_config_from_file(const char* path, s2h_config** out);
S2H_API s2h_status s2h_config_set_stages(s2h_config* config, int stages);
S2H_API s2h_status s2h_config_set_resolution(s2h_config* config, int points_per_axis);
/* mode is "real" or "complex" */
S2H_API s2h_status s2h_config_set_mode(s2h_config* config, const char* mode);
S2H_API s2h_status s2h_config_to_json(const s2h_config* config, char** out);
S2H_API void s2h_config_free(s2h_config* config);

/* ---- runs --------------------------------------------------------------- */

typedef struct s2h_run s2h_run;

/*
 * Runs the configured stages. When a stage fails, *out still receives a run
 * holding the partial report and the status names the failure.
 */
S2H_API s2h_status s2h_run_execute(const s2h_config* config, s2h_run** out);
S2H_API s2h_status s2h_run_write(const s2h_run* run, const char* directory);
S2H_API s2h_status s2h_run_report_json(const s2h_run* run, char** out);
/* -1 for a null handle. */
S2H_API int s2h_run_stages_completed(const s2h_run* run);
S2H_API void s2h_run_free(s2h_run* run);

/* Recomputes the residual report from the dumps of a finished run. */
S2H_API s2h_status s2h_verify_directory(const char* directory, char** report_json);

/* ---- schedules ---------------------------------------------------------- */

typedef struct s2h_schedule_params {
  double a, b, c, alpha, beta, sigma, K, C_prime, p;
  int n;
  int complex_mode; /* 0 = real, 1 = complex */
} s2h_schedule_params;

typedef struct s2h_schedule s2h_schedule;

S2H_API void s2h_schedule_params_default(s2h_schedule_params* params);
S2H_API s2h_status s2h_schedule_create(const s2h_schedule_params* params, s2h_schedule** out);
/* stages > 0 adds the per-stage amplitude step conditions. */
S2H_API s2h_status s2h_schedule_feasibility_json(const s2h_schedule* schedule, int stages, char** out);
S2H_API s2h_status s2h_schedule_feasible(const s2h_schedule* schedule, int stages, int* feasible);
/* Natural logarithms of delta_q and lambda_q. */
S2H_API s2h_status s2h_schedule_sequences(const s2h_schedule* schedule, int q, double* log_delta,
                                          double* log_lambda);
S2H_API void s2h_schedule_free(s2h_schedule* schedule);

S2H_API s2h_status s2h_thresholds(int n, int complex_mode, double* beta_max, double* p_min, double* kappa_min);

/* ---- diagonalization ---------------------------------------------------- */

/*
 * Reads the matrix dump <input_dir>/<name>, finds a kernel element K with
 * H + K diagonal and writes "kernel" and "amplitude_<j>" dumps to
 * output_dir (skipped when output_dir is NULL). The summary is JSON.
 */
S2H_API s2h_status s2h_diagonalize_dump(const char* input_dir, const char* name, double alpha, double sigma_tilde,
                                        const char* output_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* S2HESS_S2HESS_H */
