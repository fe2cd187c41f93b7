#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fpr/fpr_builder.hpp"
#include "fpr/io.hpp"
#include "fpr/lp.hpp"

namespace fpr::cep {

struct Generator {
  std::string id;
  std::string node;
  std::string technology;
  double capex_per_mw = 0.0;  ///< annualized
  double marginal_cost = 0.0;  ///< per MWh
  std::vector<double> availability;  ///< per snapshot, in [0, 1]
  double p_nom_min = 0.0;
  double p_nom_max = lp::kInf;
};

struct Storage {
  std::string id;
  std::string node;
  std::string technology;
  double capex_per_mwh = 0.0;
  double capex_per_mw = 0.0;
  /// Charging efficiency; discharge is lossless.
  double efficiency = 0.9;
  double e_nom_max = lp::kInf;
  double p_nom_max = lp::kInf;
};

/// Transmission link between two nodes with symmetric capacity.
struct TxLink {
  std::string id;
  std::string from;
  std::string to;
  double capex_per_mw = 0.0;
  double loss = 0.0;
  double p_nom_max = lp::kInf;
};

/// Aggregate distribution grids behind a TSO node. The link flow is positive
/// when power enters the distribution side.
struct DsoLink {
  std::string id;
  std::string node;      ///< TSO node
  std::string dso_node;  ///< node of DSO-local demand and generation
  builder::LinearFprModel model;
  std::vector<double> demand;  ///< MW per snapshot at the DSO node
  double loss = 0.02;
  double annuity_factor = 1.0;
  /// Number of identical grids represented; scales capacity and base cost.
  double grid_count = 1.0;
  /// Zero-cost link without capacity limits.
  bool uncapped = false;
};

struct CepModel {
  std::string id;
  std::vector<std::string> nodes;
  std::vector<double> weights;  ///< hours represented by each snapshot
  std::map<std::string, std::vector<double>> demand;  ///< TSO-node demand per snapshot
  std::vector<Generator> generators;
  std::vector<Storage> storage;
  std::vector<TxLink> tx_links;
  std::vector<DsoLink> dso_links;
  /// Small cost on every link flow direction, in all scenarios. Without it a
  /// lossy link may carry flow both ways at once when surplus energy is free.
  double flow_cost_per_mwh = 0.01;

  std::size_t snapshot_count() const { return weights.size(); }
};

/// Throws invalid_argument on broken invariants or inconsistent profile lengths.
void validate(const CepModel& model);

/// Column indices of the built LP.
struct Layout {
  std::vector<int> gen_p_nom;
  std::vector<std::vector<int>> gen_p;
  std::vector<int> sto_e_nom, sto_p_nom;
  std::vector<std::vector<int>> sto_charge, sto_discharge, sto_soc;
  std::vector<int> tx_p_nom;
  std::vector<std::vector<int>> tx_fwd, tx_bwd;
  std::vector<int> dso_m;
  std::vector<std::vector<int>> dso_import, dso_export;
};

struct BuiltLp {
  lp::Problem problem;
  Layout layout;
};

BuiltLp build(const CepModel& model);

struct CepSolution {
  lp::Status status = lp::Status::numerical_error;
  double objective = 0.0;
  std::map<std::string, double> capacities;  ///< asset id -> MW (MWh for storage energy: "<id>:energy")
  std::vector<double> x;
  std::string diagnostics;
};

CepSolution solve(const CepModel& model, const BuiltLp& built);
CepSolution solve(const CepModel& model);

/// Zero-cost, uncapped DSO links (distribution grid costs ignored).
CepModel derive_scenario_a(const CepModel& model);

struct EnergyRow {
  std::string scenario;
  std::string technology;
  double provided_mwh = 0.0;
  double consumed_mwh = 0.0;
};

struct ScenarioSummary {
  std::string scenario;
  double objective = 0.0;
  double link_energy_mwh = 0.0;  ///< throughput of all DSO links, both directions
  double link_losses_mwh = 0.0;
  double dso_local_generation_mwh = 0.0;
  double total_generation_mwh = 0.0;
  double dso_local_share = 0.0;
};

/// Energy balance of one solved scenario; rows are sorted by technology.
std::vector<EnergyRow> energy_balance(const CepModel& model, const BuiltLp& built,
                                      const CepSolution& solution, const std::string& scenario);
ScenarioSummary summarize(const CepModel& model, const BuiltLp& built, const CepSolution& solution,
                          const std::string& scenario);

struct StudyReport {
  std::vector<EnergyRow> rows;
  ScenarioSummary a, b;
  CepSolution solution_a, solution_b;
  BuiltLp lp_a, lp_b;
};

/// Solves both scenarios; throws infeasible unless both are optimal.
StudyReport run_study(const CepModel& scenario_a, const CepModel& scenario_b);

/// `scenario,technology,provided_mwh,consumed_mwh`
std::string report_csv(const std::vector<EnergyRow>& rows);
/// `scenario,objective,link_energy_mwh,link_losses_mwh,dso_local_generation_mwh,total_generation_mwh,dso_local_share`
std::string summary_csv(const StudyReport& report);

/// Resolves a linear_model reference given as a string in the study file.
using ModelResolver = std::function<std::filesystem::path(const std::string&)>;

CepModel model_from_json(const Json& doc, const std::string& source,
                         const ModelResolver& resolve = {});
/// Relative linear_model paths resolve against the file's directory.
CepModel load_model(const std::filesystem::path& path, const ModelResolver& resolve = {});

}  // namespace fpr::cep
