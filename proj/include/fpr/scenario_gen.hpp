#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fpr/grid_model.hpp"
#include "fpr/io.hpp"

namespace fpr::scenario {

struct UnitOverride {
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double q_min_mvar = 0.0;
  double q_max_mvar = 0.0;
  std::string technology;

  friend bool operator==(const UnitOverride&, const UnitOverride&) = default;
};

/// A randomly reallocated and scaled supply task on a fixed topology.
struct SupplyTaskScenario {
  int scenario_id = 0;
  int draw = 0;
  std::uint64_t seed = 0;
  double scale_factor = 1.0;
  std::map<std::string, UnitOverride> unit_overrides;

  friend bool operator==(const SupplyTaskScenario&, const SupplyTaskScenario&) = default;
};

struct ScenarioConfig {
  int n_random_draws = 1;
  std::vector<double> scale_factors{1.0, 1.25, 1.5, 2.0, 3.0};
  std::uint64_t master_seed = 0;
  /// Technology shares sampled for generators; empty keeps the base tags.
  std::map<std::string, double> technology_mix;
  /// Technology shares sampled for loads; empty keeps the base tags.
  std::map<std::string, double> load_technology_mix;
  /// Reactive range is |p| * tan(acos(cos_phi)) in both directions.
  double cos_phi = 0.9;
};

/// Throws invalid_argument when the configuration breaks its invariants.
void check_config(const ScenarioConfig& cfg);

/// splitmix64-based mixing of (master seed, draw, scale index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t draw,
                          std::uint64_t scale_index);

/// Emits n_random_draws x |scale_factors| scenarios, draw-major. Total load
/// and generation capacity are partitioned over the candidate buses (non-PCC
/// buses hosting a unit of that kind) by normalized uniform weights; a bus
/// share is split evenly across its units. Equivalent child-grid units are
/// left untouched.
std::vector<SupplyTaskScenario> generate(const grid::Network& net, const ScenarioConfig& cfg);

/// Network with the overridden unit ranges; topology is untouched.
grid::Network apply(const grid::Network& net, const SupplyTaskScenario& scenario);

/// Sum of generator p_max and of load consumption magnitude (-p_min).
struct CapacityTotals {
  double generation_mw = 0.0;
  double load_mw = 0.0;
};
CapacityTotals capacity_totals(const grid::Network& net);

Json scenarios_to_json(const std::vector<SupplyTaskScenario>& scenarios);
std::vector<SupplyTaskScenario> scenarios_from_json(const Json& doc);
ScenarioConfig config_from_json(const Json& doc, const std::string& where);

}  // namespace fpr::scenario
