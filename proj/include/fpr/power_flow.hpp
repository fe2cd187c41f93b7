#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fpr/grid_model.hpp"

namespace fpr::pf {

struct Setpoint {
  double p_mw = 0.0;
  double q_mvar = 0.0;

  friend bool operator==(const Setpoint&, const Setpoint&) = default;
};

/// Unit setpoints in injection convention. Units without an entry inject nothing.
struct DispatchPoint {
  std::map<std::string, Setpoint> setpoints;

  friend bool operator==(const DispatchPoint&, const DispatchPoint&) = default;
};

struct BranchFlow {
  std::string element_id;
  bool is_transformer = false;
  double s_from_mva = 0.0;
  double s_to_mva = 0.0;
  double p_from_mw = 0.0;
  double q_from_mvar = 0.0;
  double p_to_mw = 0.0;
  double q_to_mvar = 0.0;
  double loading_percent = 0.0;
};

struct PfSolution {
  std::vector<double> v_pu;       ///< per bus, network bus order
  std::vector<double> theta_rad;  ///< per bus
  std::vector<BranchFlow> branch_flows;  ///< lines first, then transformers
  /// Power drawn from the upstream grid at the PCC (import positive).
  double pcc_p_mw = 0.0;
  double pcc_q_mvar = 0.0;
  double losses_p_mw = 0.0;
  double losses_q_mvar = 0.0;
  bool converged = false;
  bool singular = false;
  int iterations = 0;
  double max_mismatch = 0.0;  ///< per unit
};

struct SolverOptions {
  double tolerance_pu = 1e-10;
  int max_iterations = 50;
};

/// Newton-Raphson power flow in polar coordinates, flat start, PCC as slack
/// at 1.0 pu. The admittance matrix is built once and reused across solves.
class PowerFlowModel {
 public:
  explicit PowerFlowModel(const grid::Network& net);

  const grid::Network& network() const { return *net_; }
  std::size_t bus_count() const { return n_; }
  std::size_t pcc() const { return pcc_; }
  /// Bus index of every unit, network unit order.
  const std::vector<std::size_t>& unit_bus() const { return unit_bus_; }

  /// Solves for per-unit setpoints given in network unit order.
  PfSolution solve_units(const std::vector<Setpoint>& unit_setpoints,
                         const SolverOptions& options = {}) const;
  PfSolution solve(const DispatchPoint& dispatch, const SolverOptions& options = {}) const;

  const Eigen::MatrixXcd& admittance() const { return y_; }

 private:
  PfSolution solve_injections(const Eigen::VectorXcd& s_spec, const SolverOptions& options) const;

  const grid::Network* net_;
  std::size_t n_ = 0;
  std::size_t pcc_ = 0;
  Eigen::MatrixXcd y_;
  std::vector<std::size_t> unit_bus_;
  struct Branch {
    std::size_t from, to;
    std::complex<double> y;
    double rating_mva;
    std::string id;
    bool is_transformer;
  };
  std::vector<Branch> branches_;
};

/// Builds the admittance matrix (series elements only) in bus order.
Eigen::MatrixXcd build_admittance(const grid::Network& net);

PfSolution solve(const grid::Network& net, const DispatchPoint& dispatch,
                 const SolverOptions& options = {});

enum class VoltageBound { lower, upper };

struct ThermalViolation {
  std::string element_id;
  double loading_percent = 0.0;
};

struct VoltageViolation {
  std::string bus_id;
  double v_pu = 0.0;
  VoltageBound bound = VoltageBound::lower;
};

struct ViolationReport {
  std::vector<ThermalViolation> thermal;
  std::vector<VoltageViolation> voltage;

  bool empty() const { return thermal.empty() && voltage.empty(); }
};

/// Thermal entries sorted by descending loading, voltage entries by ascending
/// voltage; ties broken by id. Throws a contract error on unconverged input.
ViolationReport check_violations(const grid::Network& net, const PfSolution& sol);

/// CSV dumps: `bus,v_pu,theta_rad` and `element,loading_percent`.
std::string bus_voltages_csv(const grid::Network& net, const PfSolution& sol);
std::string branch_loading_csv(const PfSolution& sol);

}  // namespace fpr::pf
