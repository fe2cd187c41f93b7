#ifndef FPR_FPR_H
#define FPR_FPR_H

#include <stddef.h>
#include <stdint.h>

#if defined(FPR_BUILDING_LIBRARY)
#define FPR_API __attribute__((visibility("default")))
#else
#define FPR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum fpr_status {
  FPR_OK = 0,
  FPR_ERR_INVALID_ARGUMENT = 1,
  FPR_ERR_IO = 2,
  FPR_ERR_SCHEMA = 3,
  FPR_ERR_TOPOLOGY = 4,
  FPR_ERR_CATALOG = 5,
  FPR_ERR_CONTRACT = 6,
  FPR_ERR_UNPLANNABLE = 7,
  FPR_ERR_INFEASIBLE = 8,
  FPR_ERR_NUMERICAL = 9,
  FPR_ERR_INTERNAL = 10
} fpr_status;

typedef enum fpr_use_case { FPR_HIGH_LOAD = 0, FPR_HIGH_FEED_IN = 1 } fpr_use_case;

typedef struct fpr_context fpr_context;
typedef struct fpr_network fpr_network;

/* Short name of a status ("io", "schema", ...); "ok" for FPR_OK. */
FPR_API const char* fpr_status_name(fpr_status status);

/* Message of the last failed call on the calling thread; "" if none. */
FPR_API const char* fpr_last_error(void);

/* --- pipeline ------------------------------------------------------------ */

/* Loads a pipeline configuration file. */
FPR_API fpr_status fpr_context_create(const char* config_path, fpr_context** out);
FPR_API void fpr_context_destroy(fpr_context* ctx);

FPR_API fpr_status fpr_context_set_seed(fpr_context* ctx, uint64_t seed);
/* 0 uses all cores. */
FPR_API fpr_status fpr_context_set_jobs(fpr_context* ctx, int jobs);
FPR_API fpr_status fpr_context_set_out(fpr_context* ctx, const char* out_dir);
FPR_API fpr_status fpr_context_set_skip_failed(fpr_context* ctx, int skip);
FPR_API fpr_status fpr_context_set_export_lp(fpr_context* ctx, int export_lp);
/* Silences progress lines on standard error when quiet != 0. */
FPR_API fpr_status fpr_context_set_quiet(fpr_context* ctx, int quiet);

FPR_API fpr_status fpr_run_variate(fpr_context* ctx);
FPR_API fpr_status fpr_run_for(fpr_context* ctx);
FPR_API fpr_status fpr_run_fpr(fpr_context* ctx);
FPR_API fpr_status fpr_run_linearize(fpr_context* ctx);
FPR_API fpr_status fpr_run_cep(fpr_context* ctx);
FPR_API fpr_status fpr_run_pipeline(fpr_context* ctx);

/* --- single networks ----------------------------------------------------- */

FPR_API fpr_status fpr_network_load(const char* grid_path, const char* catalog_path,
                                    fpr_network** out);
FPR_API void fpr_network_destroy(fpr_network* net);
FPR_API size_t fpr_network_bus_count(const fpr_network* net);
FPR_API size_t fpr_network_unit_count(const fpr_network* net);

/* Power flow of a grid use case. Any output pointer may be NULL.
   violations receives the number of thermal plus voltage violations. */
FPR_API fpr_status fpr_network_use_case(const fpr_network* net, fpr_use_case use_case,
                                        double* pcc_p_mw, double* pcc_q_mvar, double* v_min_pu,
                                        int* violations);

/* Feasible operation region. vertices receives 2*n_directions values
   (p_mw, q_mvar pairs); tolerance_mw <= 0 selects the default. */
FPR_API fpr_status fpr_network_compute_for(const fpr_network* net, int n_directions,
                                           double tolerance_mw, int jobs, double* vertices,
                                           double* area);

#ifdef __cplusplus
}
#endif

#endif
