#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpr/error.hpp"
#include "fpr/grid_model.hpp"
#include "fpr/io.hpp"
#include "fpr/power_flow.hpp"

namespace fpr::expansion {

enum class UseCase { high_load, high_feed_in };
const char* to_string(UseCase use_case);

struct UseCaseConfig {
  /// Share of full consumption kept by loads in the high feed-in case.
  double feed_in_load_fraction = 0.1;
};

/// Worst-case dispatch. high_load: loads at full consumption (p_min, q_min
/// scaled alike), generators at p_min. high_feed_in: generators at p_max,
/// loads at the configured fraction of full consumption. Reactive setpoints
/// of generators are zero clipped into range. Equivalent child-grid units
/// take the polygon vertex of minimal (high_load) or maximal (high_feed_in)
/// active injection.
pf::DispatchPoint use_case_dispatch(const grid::Network& net, UseCase use_case,
                                    const UseCaseConfig& cfg = {});

struct UseCaseResult {
  pf::PfSolution high_load;
  pf::PfSolution high_feed_in;
  bool converged = false;
  /// Merged violations of both cases (worst entry per element). Empty when
  /// either case failed to converge.
  pf::ViolationReport violations;
};
UseCaseResult evaluate_use_cases(const grid::Network& net, const UseCaseConfig& cfg = {});

enum class MeasureKind {
  replace_line_type,
  add_parallel_line,
  split_line_at_two_thirds,
  replace_transformer,
  add_parallel_transformer,
};
const char* to_string(MeasureKind kind);
MeasureKind parse_measure_kind(const std::string& text);

struct Measure {
  MeasureKind kind = MeasureKind::replace_line_type;
  std::string target;
  std::optional<std::string> new_type;
  /// Circuit length of newly laid or replaced line (line measures).
  double length_km = 0.0;
  /// Number of transformer units bought (transformer measures).
  int quantity = 0;
  double cost_delta = 0.0;

  friend bool operator==(const Measure&, const Measure&) = default;
};

struct ExpansionStage {
  grid::Network network;
  std::vector<Measure> measures;
  double total_cost = 0.0;
  int scenario_id = 0;
  double scale_factor = 1.0;
};

struct ReinforceOptions {
  double planning_margin = 0.2;
  int max_iterations = 25;
  UseCaseConfig use_cases;
};

/// Raised when the iteration cap is hit or the use cases stop converging.
class ReinforcementError : public Error {
 public:
  ReinforcementError(const std::string& message, pf::ViolationReport residual)
      : Error(ErrorKind::unplannable, message), residual_(std::move(residual)) {}
  const pf::ViolationReport& residual() const { return residual_; }

 private:
  pf::ViolationReport residual_;
};

/// Heuristic reinforcement: thermal violations first (smallest sufficient
/// catalog type, otherwise parallel circuits), then voltage violations by
/// separating the feeder at two thirds of its impedance towards the worst
/// bus and feeding that point by a new line from the substation.
ExpansionStage reinforce(const grid::Network& net, const grid::EquipmentCatalog& catalog,
                         const ReinforceOptions& options = {});

/// Total line and transformer cost of the given measures:
/// sum over line measures of (install + material) * length plus transformer cost.
double stage_cost(std::span<const Measure> measures, const grid::EquipmentCatalog& catalog,
                  grid::Urbanization urbanization);

/// Cost recorded on embedded child-grid units.
double embedded_child_cost(const grid::Network& net);

/// Bus feeding the distribution grid: LV side of the transformer at the PCC,
/// or the PCC itself when the grid has no transformer there.
std::size_t substation_bus(const grid::Network& net);

Json measure_to_json(const Measure& m);
Measure measure_from_json(const Json& j, const std::string& where);
Json stage_to_json(const ExpansionStage& stage);
ExpansionStage stage_from_json(const Json& doc, const std::string& source);

}  // namespace fpr::expansion
