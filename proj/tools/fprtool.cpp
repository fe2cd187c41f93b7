#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fpr/fpr.h"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  bool skip_failed = false;
  bool export_lp = false;
  bool quiet = false;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int report(fpr_status st) {
  if (st == FPR_OK) return 0;
  std::cerr << "error[" << fpr_status_name(st) << "]: " << one_line(fpr_last_error()) << '\n';
  return static_cast<int>(st);
}

int run(const Options& opt, fpr_status (*step)(fpr_context*)) {
  fpr_context* ctx = nullptr;
  fpr_status st = fpr_context_create(opt.config.c_str(), &ctx);
  if (st == FPR_OK && opt.seed) st = fpr_context_set_seed(ctx, *opt.seed);
  if (st == FPR_OK && opt.jobs) st = fpr_context_set_jobs(ctx, *opt.jobs);
  if (st == FPR_OK && opt.out) st = fpr_context_set_out(ctx, opt.out->c_str());
  if (st == FPR_OK && opt.skip_failed) st = fpr_context_set_skip_failed(ctx, 1);
  if (st == FPR_OK && opt.export_lp) st = fpr_context_set_export_lp(ctx, 1);
  if (st == FPR_OK && opt.quiet) st = fpr_context_set_quiet(ctx, 1);
  if (st == FPR_OK) st = step(ctx);
  const int code = report(st);
  fpr_context_destroy(ctx);
  return code;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("-c,--config", opt.config, "pipeline configuration (JSON)")->required();
  sub->add_option("--seed", opt.seed, "master seed for scenario generation");
  sub->add_option("--jobs", opt.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", opt.out, "output directory");
  sub->add_flag("--skip-failed", opt.skip_failed, "skip unplannable scenarios instead of failing");
  sub->add_flag("--export-lp", opt.export_lp, "write LP text files of the CEP scenarios");
  sub->add_flag("-q,--quiet", opt.quiet, "no progress lines on standard error");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasible planning regions of distribution grids"};
  app.require_subcommand(1);
  Options opt;

  struct Sub {
    const char* name;
    const char* help;
    fpr_status (*step)(fpr_context*);
  };
  const Sub subs[] = {
      {"variate", "generate supply-task scenarios and reinforced expansion stages", fpr_run_variate},
      {"for", "compute feasible operation regions of all stages", fpr_run_for},
      {"fpr", "bottom-up stages, regions, planning regions and linear models", fpr_run_fpr},
      {"linearize", "re-fit linear models from planning regions", fpr_run_linearize},
      {"cep", "solve the capacity expansion study (scenarios A and B)", fpr_run_cep},
      {"pipeline", "fpr followed by cep", fpr_run_pipeline},
  };
  fpr_status (*chosen)(fpr_context*) = nullptr;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, opt);
    sub->callback([&chosen, step = s.step] { chosen = step; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[invalid_argument]: " << one_line(e.what()) << '\n';
    return FPR_ERR_INVALID_ARGUMENT;
  }
  return run(opt, chosen);
}
