#include "fpr/fpr.h"

#include <algorithm>
#include <exception>
#include <string>

#include "fpr/error.hpp"
#include "fpr/expansion.hpp"
#include "fpr/for_engine.hpp"
#include "fpr/grid_model.hpp"
#include "fpr/pipeline.hpp"

struct fpr_context {
  fpr::pipeline::PipelineConfig config;
  bool quiet = false;
};

struct fpr_network {
  fpr::grid::Network net;
};

namespace {

thread_local std::string g_last_error;

fpr_status status_of(fpr::ErrorKind kind) {
  using fpr::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument: return FPR_ERR_INVALID_ARGUMENT;
    case ErrorKind::io: return FPR_ERR_IO;
    case ErrorKind::schema: return FPR_ERR_SCHEMA;
    case ErrorKind::topology: return FPR_ERR_TOPOLOGY;
    case ErrorKind::catalog: return FPR_ERR_CATALOG;
    case ErrorKind::contract: return FPR_ERR_CONTRACT;
    case ErrorKind::unplannable: return FPR_ERR_UNPLANNABLE;
    case ErrorKind::infeasible: return FPR_ERR_INFEASIBLE;
    case ErrorKind::numerical: return FPR_ERR_NUMERICAL;
  }
  return FPR_ERR_INTERNAL;
}

template <class F>
fpr_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return FPR_OK;
  } catch (const fpr::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FPR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return FPR_ERR_INTERNAL;
  }
}

fpr_status null_arg(const char* what) {
  g_last_error = std::string(what) + " is NULL";
  return FPR_ERR_INVALID_ARGUMENT;
}

fpr::pipeline::Logger logger_for(const fpr_context* ctx) {
  if (ctx->quiet) return [](const std::string&) {};
  return fpr::pipeline::stderr_logger();
}

}  // namespace

extern "C" {

const char* fpr_status_name(fpr_status status) {
  switch (status) {
    case FPR_OK: return "ok";
    case FPR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FPR_ERR_IO: return "io";
    case FPR_ERR_SCHEMA: return "schema";
    case FPR_ERR_TOPOLOGY: return "topology";
    case FPR_ERR_CATALOG: return "catalog";
    case FPR_ERR_CONTRACT: return "contract";
    case FPR_ERR_UNPLANNABLE: return "unplannable";
    case FPR_ERR_INFEASIBLE: return "infeasible";
    case FPR_ERR_NUMERICAL: return "numerical";
    case FPR_ERR_INTERNAL: return "internal";
  }
  return "internal";
}

const char* fpr_last_error(void) { return g_last_error.c_str(); }

fpr_status fpr_context_create(const char* config_path, fpr_context** out) {
  if (!config_path) return null_arg("config_path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto ctx = new fpr_context{fpr::pipeline::load_config(config_path), false};
    *out = ctx;
  });
}

void fpr_context_destroy(fpr_context* ctx) { delete ctx; }

fpr_status fpr_context_set_seed(fpr_context* ctx, uint64_t seed) {
  if (!ctx) return null_arg("ctx");
  ctx->config.scenarios.master_seed = seed;
  return FPR_OK;
}

fpr_status fpr_context_set_jobs(fpr_context* ctx, int jobs) {
  if (!ctx) return null_arg("ctx");
  if (jobs < 0) {
    g_last_error = "jobs must be >= 0";
    return FPR_ERR_INVALID_ARGUMENT;
  }
  ctx->config.jobs = jobs;
  return FPR_OK;
}

fpr_status fpr_context_set_out(fpr_context* ctx, const char* out_dir) {
  if (!ctx) return null_arg("ctx");
  if (!out_dir) return null_arg("out_dir");
  ctx->config.out = out_dir;
  return FPR_OK;
}

fpr_status fpr_context_set_skip_failed(fpr_context* ctx, int skip) {
  if (!ctx) return null_arg("ctx");
  ctx->config.skip_failed = skip != 0;
  return FPR_OK;
}

fpr_status fpr_context_set_export_lp(fpr_context* ctx, int export_lp) {
  if (!ctx) return null_arg("ctx");
  ctx->config.export_lp = export_lp != 0;
  return FPR_OK;
}

fpr_status fpr_context_set_quiet(fpr_context* ctx, int quiet) {
  if (!ctx) return null_arg("ctx");
  ctx->quiet = quiet != 0;
  return FPR_OK;
}

#define FPR_RUN(name, fn)                                                  \
  fpr_status name(fpr_context* ctx) {                                      \
    if (!ctx) return null_arg("ctx");                                      \
    return guarded([&] { fpr::pipeline::fn(ctx->config, logger_for(ctx)); }); \
  }

FPR_RUN(fpr_run_variate, run_variate)
FPR_RUN(fpr_run_for, run_for)
FPR_RUN(fpr_run_fpr, run_fpr)
FPR_RUN(fpr_run_linearize, run_linearize)
FPR_RUN(fpr_run_cep, run_cep)
FPR_RUN(fpr_run_pipeline, run_pipeline)

#undef FPR_RUN

fpr_status fpr_network_load(const char* grid_path, const char* catalog_path, fpr_network** out) {
  if (!grid_path) return null_arg("grid_path");
  if (!catalog_path) return null_arg("catalog_path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto catalog = fpr::grid::load_catalog(catalog_path);
    *out = new fpr_network{fpr::grid::load_network(grid_path, catalog)};
  });
}

void fpr_network_destroy(fpr_network* net) { delete net; }

size_t fpr_network_bus_count(const fpr_network* net) { return net ? net->net.buses.size() : 0; }

size_t fpr_network_unit_count(const fpr_network* net) { return net ? net->net.units.size() : 0; }

fpr_status fpr_network_use_case(const fpr_network* net, fpr_use_case use_case, double* pcc_p_mw,
                                double* pcc_q_mvar, double* v_min_pu, int* violations) {
  if (!net) return null_arg("net");
  if (use_case != FPR_HIGH_LOAD && use_case != FPR_HIGH_FEED_IN) {
    g_last_error = "unknown use case";
    return FPR_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto uc = use_case == FPR_HIGH_LOAD ? fpr::expansion::UseCase::high_load
                                              : fpr::expansion::UseCase::high_feed_in;
    const auto sol = fpr::pf::solve(net->net, fpr::expansion::use_case_dispatch(net->net, uc));
    if (!sol.converged) fpr::fail(fpr::ErrorKind::numerical, "power flow did not converge");
    const auto report = fpr::pf::check_violations(net->net, sol);
    if (pcc_p_mw) *pcc_p_mw = sol.pcc_p_mw;
    if (pcc_q_mvar) *pcc_q_mvar = sol.pcc_q_mvar;
    if (v_min_pu) *v_min_pu = *std::min_element(sol.v_pu.begin(), sol.v_pu.end());
    if (violations) *violations = static_cast<int>(report.thermal.size() + report.voltage.size());
  });
}

fpr_status fpr_network_compute_for(const fpr_network* net, int n_directions, double tolerance_mw,
                                   int jobs, double* vertices, double* area) {
  if (!net) return null_arg("net");
  if (!vertices) return null_arg("vertices");
  return guarded([&] {
    fpr::region::SweepConfig cfg;
    cfg.n_directions = n_directions;
    if (tolerance_mw > 0) cfg.bisection_tol_mw = tolerance_mw;
    cfg.jobs = jobs;
    const auto poly = fpr::region::compute_for(net->net, cfg);
    for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
      vertices[2 * k] = poly.vertices[k].p_mw;
      vertices[2 * k + 1] = poly.vertices[k].q_mvar;
    }
    if (area) *area = poly.area_mva2;
  });
}

}  // extern "C"
