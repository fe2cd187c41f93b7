#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpr/expansion.hpp"
#include "fpr/for_engine.hpp"
#include "fpr/fpr_builder.hpp"
#include "fpr/io.hpp"
#include "fpr/scenario_gen.hpp"

namespace fpr::pipeline {

struct ChildLink {
  std::string grid;  ///< id of a grid configured in the same pipeline
  std::string bus;   ///< attach bus in the parent
};

struct GridConfig {
  std::string id;
  std::filesystem::path path;
  std::vector<ChildLink> children;
  builder::ChildSelection selection = builder::ChildSelection::by_scale;
};

struct PipelineConfig {
  std::filesystem::path catalog;
  std::filesystem::path out = "out";
  std::vector<GridConfig> grids;
  scenario::ScenarioConfig scenarios;
  region::SweepConfig sweep;
  expansion::ReinforceOptions reinforce;
  builder::LinearizeOptions linearize;
  std::optional<std::filesystem::path> cep_study;
  int jobs = 0;
  bool skip_failed = false;
  bool export_lp = false;
};

/// Relative paths resolve against `base_dir`.
PipelineConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir,
                                const std::string& source);
PipelineConfig load_config(const std::filesystem::path& path);

/// Grid indices such that children precede parents; ties go by voltage
/// level (LV, MV, HV), then configuration order.
std::vector<std::size_t> dependency_order(const PipelineConfig& cfg);

using Logger = std::function<void(const std::string&)>;
/// Writes "[fpr] message" lines to standard error.
Logger stderr_logger();

/// Output locations below cfg.out.
std::filesystem::path grid_dir(const PipelineConfig& cfg, const std::string& grid_id);
std::filesystem::path stage_path(const PipelineConfig& cfg, const std::string& grid_id, int scenario_id);
std::filesystem::path for_path(const PipelineConfig& cfg, const std::string& grid_id, int scenario_id);

/// Scenarios plus reinforced stages for every grid whose children have an FPR.
void run_variate(const PipelineConfig& cfg, const Logger& log);
/// FORs of all existing stages.
void run_for(const PipelineConfig& cfg, const Logger& log);
/// Bottom-up chain per grid: variate, FOR, assembly and linearization.
void run_fpr(const PipelineConfig& cfg, const Logger& log);
/// Re-linearizes every existing fpr.json.
void run_linearize(const PipelineConfig& cfg, const Logger& log);
/// Scenario A/B comparison of the configured study.
void run_cep(const PipelineConfig& cfg, const Logger& log);
void run_pipeline(const PipelineConfig& cfg, const Logger& log);

}  // namespace fpr::pipeline
