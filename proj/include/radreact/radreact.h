#ifndef RADREACT_H
#define RADREACT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RR_API __declspec(dllexport)
#else
#define RR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; also the CLI exit codes. */
typedef enum rr_status {
  RR_OK = 0,
  RR_ERR_CONFIG = 2,
  RR_ERR_CONVERGENCE = 3,
  RR_ERR_MAXACCEL = 4,
  RR_ERR_RUNAWAY = 5,
  RR_ERR_ACCEPTANCE = 6,
  RR_ERR_REGIME = 7,
  RR_ERR_IO = 8,
  RR_ERR_INVALID_ARG = 9,
  RR_ERR_INTERNAL = 10
} rr_status;

typedef struct rr_config rr_config;
typedef struct rr_trajectory rr_trajectory;
typedef struct rr_report rr_report;

RR_API const char* rr_version(void);
RR_API const char* rr_status_name(int status);
/* Message of the last failing call on this thread ("" if none). */
RR_API const char* rr_last_error(void);
/* Frees strings returned through char** out-parameters. */
RR_API void rr_string_free(char* s);

/* ---- configuration ---- */
RR_API int rr_config_parse(const char* json_text, rr_config** out);
RR_API int rr_config_load(const char* path, rr_config** out);
RR_API void rr_config_free(rr_config* cfg);
/* Overrides; each revalidates and leaves cfg unchanged on failure. */
RR_API int rr_config_set_model(rr_config* cfg, const char* model_name);
RR_API int rr_config_set_dt(rr_config* cfg, double dt);
RR_API int rr_config_set_tol(rr_config* cfg, double tol);
RR_API int rr_config_set_seed(rr_config* cfg, uint64_t seed);
RR_API int rr_config_set_output_dir(rr_config* cfg, const char* dir);
/* which: "dir", "trajectory", "audit" or "gaps". The pointer lives as long as cfg. */
RR_API const char* rr_config_output(const rr_config* cfg, const char* which);

/* ---- simulation ---- */
/* Integrates and audits. Returns RR_OK, or the run's failure code
   (convergence, maxaccel, runaway, regime) with *traj and *report still set
   to the partial result. Other codes leave both NULL. */
RR_API int rr_simulate(const rr_config* cfg, rr_trajectory** traj, rr_report** report);

RR_API size_t rr_trajectory_rows(const rr_trajectory* t);
/* Copies a column (names as in the CSV header) into out[0..n). */
RR_API int rr_trajectory_column(const rr_trajectory* t, const char* name, double* out, size_t n);
/* Run status as a status code. */
RR_API int rr_trajectory_status(const rr_trajectory* t);
RR_API size_t rr_trajectory_event_count(const rr_trajectory* t);
/* Pointers stay valid as long as t. */
RR_API int rr_trajectory_event(const rr_trajectory* t, size_t i, const char** kind, double* tau,
                               const char** detail);
RR_API int rr_trajectory_write_csv(const rr_trajectory* t, const char* path);
RR_API int rr_trajectory_read_csv(const char* path, rr_trajectory** out);
RR_API void rr_trajectory_free(rr_trajectory* t);

/* Audits a stored trajectory against the model and field of cfg. */
RR_API int rr_audit(const rr_config* cfg, const rr_trajectory* t, rr_report** out);
RR_API int rr_report_all_pass(const rr_report* r);
RR_API int rr_report_runaway_detected(const rr_report* r);
RR_API int rr_report_preacceleration_detected(const rr_report* r);
/* Aligned text table; lives as long as r. */
RR_API const char* rr_report_table(const rr_report* r);
RR_API int rr_report_write_json(const rr_report* r, const char* path);
RR_API void rr_report_free(rr_report* r);

/* ---- comparison and canonical scenarios ---- */
/* Runs the config's scenario once per model, writes <dir>/<model>.csv for
   every model that produced rows and the gap summary to <dir>/<gaps file>.
   Returns RR_OK when every model finished cleanly, otherwise the first
   failure code; files are written either way. */
RR_API int rr_compare(const rr_config* cfg, const char* const* models, size_t n_models,
                      const char* out_dir);
/* Returns RR_OK on pass, RR_ERR_ACCEPTANCE on failure; *report (may be
   NULL) receives a text summary to be freed with rr_string_free. */
RR_API int rr_canonical(const char* name, uint64_t seed, char** report);

#ifdef __cplusplus
}
#endif

#endif
