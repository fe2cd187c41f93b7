#include "fpr/power_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpr/error.hpp"

namespace fpr::pf {

using cd = std::complex<double>;

Eigen::MatrixXcd build_admittance(const grid::Network& net) {
  const auto n = static_cast<Eigen::Index>(net.buses.size());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  auto stamp = [&](std::size_t i, std::size_t j, cd yb) {
    y(i, i) += yb;
    y(j, j) += yb;
    y(i, j) -= yb;
    y(j, i) -= yb;
  };
  for (const auto& l : net.lines) {
    stamp(*net.bus_index(l.from_bus), *net.bus_index(l.to_bus),
          1.0 / grid::line_impedance_pu(net, l));
  }
  for (const auto& t : net.transformers) {
    stamp(*net.bus_index(t.hv_bus), *net.bus_index(t.lv_bus),
          1.0 / grid::transformer_impedance_pu(net, t));
  }
  return y;
}

PowerFlowModel::PowerFlowModel(const grid::Network& net)
    : net_(&net), n_(net.buses.size()), pcc_(net.pcc_index()), y_(build_admittance(net)) {
  unit_bus_.reserve(net.units.size());
  for (const auto& u : net.units) unit_bus_.push_back(*net.bus_index(u.bus));
  for (const auto& l : net.lines) {
    branches_.push_back({*net.bus_index(l.from_bus), *net.bus_index(l.to_bus),
                         1.0 / grid::line_impedance_pu(net, l), grid::line_rating_mva(net, l), l.id,
                         false});
  }
  for (const auto& t : net.transformers) {
    branches_.push_back({*net.bus_index(t.hv_bus), *net.bus_index(t.lv_bus),
                         1.0 / grid::transformer_impedance_pu(net, t),
                         grid::transformer_rating_mva(t), t.id, true});
  }
}

PfSolution PowerFlowModel::solve(const DispatchPoint& dispatch,
                                 const SolverOptions& options) const {
  std::vector<Setpoint> sp(net_->units.size());
  for (const auto& [id, s] : dispatch.setpoints) {
    bool found = false;
    for (std::size_t i = 0; i < net_->units.size(); ++i) {
      if (net_->units[i].id == id) {
        sp[i] = s;
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorKind::contract, "dispatch references unknown unit '" + id + "'");
  }
  return solve_units(sp, options);
}

PfSolution PowerFlowModel::solve_units(const std::vector<Setpoint>& unit_setpoints,
                                       const SolverOptions& options) const {
  if (unit_setpoints.size() != unit_bus_.size()) {
    fail(ErrorKind::contract, "setpoint count does not match unit count");
  }
  Eigen::VectorXcd s_spec = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_));
  for (std::size_t u = 0; u < unit_bus_.size(); ++u) {
    s_spec(static_cast<Eigen::Index>(unit_bus_[u])) +=
        cd(unit_setpoints[u].p_mw, unit_setpoints[u].q_mvar) / net_->base_mva;
  }
  return solve_injections(s_spec, options);
}

PfSolution PowerFlowModel::solve_injections(const Eigen::VectorXcd& s_spec,
                                            const SolverOptions& options) const {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto slack = static_cast<Eigen::Index>(pcc_);
  PfSolution sol;

  // Unknown ordering: theta of non-slack buses, then |V| of non-slack buses.
  std::vector<Eigen::Index> pq;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != slack) pq.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(pq.size());

  Eigen::VectorXd vm = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
  Eigen::VectorXcd v(n);

  auto compose = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(vm(i), va(i));
  };
  auto mismatch = [&](Eigen::VectorXd& f) {
    const Eigen::VectorXcd s_calc = v.cwiseProduct((y_ * v).conjugate());
    f.resize(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const cd d = s_calc(pq[k]) - s_spec(pq[k]);
      f(k) = d.real();
      f(m + k) = d.imag();
    }
  };

  compose();
  Eigen::VectorXd f;
  mismatch(f);
  double norm = m > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
  int it = 0;
  bool diverged = false;
  while (norm > options.tolerance_pu && it < options.max_iterations) {
    // dS/dVa and dS/dVm for complex power injections.
    const Eigen::VectorXcd ibus = y_ * v;
    Eigen::MatrixXcd ds_dva = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd ds_dvm = Eigen::MatrixXcd::Zero(n, n);
    const cd j(0.0, 1.0);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const cd vnorm_c = v(c) / vm(c);
        ds_dva(r, c) = j * v(r) * std::conj(-y_(r, c) * v(c));
        ds_dvm(r, c) = v(r) * std::conj(y_(r, c) * vnorm_c);
      }
      ds_dva(r, r) += j * v(r) * std::conj(ibus(r));
      ds_dvm(r, r) += std::conj(ibus(r)) * v(r) / vm(r);
    }
    Eigen::MatrixXd jac(2 * m, 2 * m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        jac(a, b) = ds_dva(pq[a], pq[b]).real();
        jac(a, m + b) = ds_dvm(pq[a], pq[b]).real();
        jac(m + a, b) = ds_dva(pq[a], pq[b]).imag();
        jac(m + a, m + b) = ds_dvm(pq[a], pq[b]).imag();
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) {
      sol.singular = true;
      diverged = true;
      break;
    }
    const Eigen::VectorXd dx = lu.solve(-f);
    for (Eigen::Index k = 0; k < m; ++k) {
      va(pq[k]) += dx(k);
      vm(pq[k]) += dx(m + k);
    }
    ++it;
    if (!vm.allFinite() || !va.allFinite() || vm.minCoeff() <= 0.05) {
      diverged = true;
      break;
    }
    compose();
    mismatch(f);
    norm = f.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm) || norm > 1e8) {
      diverged = true;
      break;
    }
  }

  sol.iterations = it;
  sol.max_mismatch = norm;
  sol.converged = !diverged && norm <= options.tolerance_pu;
  sol.v_pu.assign(vm.data(), vm.data() + n);
  sol.theta_rad.assign(va.data(), va.data() + n);

  const double base = net_->base_mva;
  const Eigen::VectorXcd s_calc = v.cwiseProduct((y_ * v).conjugate());
  const cd s_pcc = (s_calc(slack) - s_spec(slack)) * base;
  sol.pcc_p_mw = s_pcc.real();
  sol.pcc_q_mvar = s_pcc.imag();

  cd losses(0.0, 0.0);
  sol.branch_flows.reserve(branches_.size());
  for (const auto& br : branches_) {
    const cd vf = v(static_cast<Eigen::Index>(br.from));
    const cd vt = v(static_cast<Eigen::Index>(br.to));
    const cd i_ft = (vf - vt) * br.y;
    const cd s_from = vf * std::conj(i_ft) * base;
    const cd s_to = vt * std::conj(-i_ft) * base;
    losses += s_from + s_to;
    BranchFlow bf;
    bf.element_id = br.id;
    bf.is_transformer = br.is_transformer;
    bf.s_from_mva = std::abs(s_from);
    bf.s_to_mva = std::abs(s_to);
    bf.p_from_mw = s_from.real();
    bf.q_from_mvar = s_from.imag();
    bf.p_to_mw = s_to.real();
    bf.q_to_mvar = s_to.imag();
    bf.loading_percent = 100.0 * std::max(bf.s_from_mva, bf.s_to_mva) / br.rating_mva;
    sol.branch_flows.push_back(std::move(bf));
  }
  sol.losses_p_mw = losses.real();
  sol.losses_q_mvar = losses.imag();
  return sol;
}

PfSolution solve(const grid::Network& net, const DispatchPoint& dispatch,
                 const SolverOptions& options) {
  return PowerFlowModel(net).solve(dispatch, options);
}

ViolationReport check_violations(const grid::Network& net, const PfSolution& sol) {
  if (!sol.converged) {
    fail(ErrorKind::contract, "check_violations called on a non-converged power flow");
  }
  constexpr double eps = 1e-9;
  ViolationReport report;
  for (const auto& bf : sol.branch_flows) {
    if (bf.loading_percent > 100.0 + eps) report.thermal.push_back({bf.element_id, bf.loading_percent});
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const auto& b = net.buses[i];
    if (sol.v_pu[i] < b.v_min_pu - eps) {
      report.voltage.push_back({b.id, sol.v_pu[i], VoltageBound::lower});
    } else if (sol.v_pu[i] > b.v_max_pu + eps) {
      report.voltage.push_back({b.id, sol.v_pu[i], VoltageBound::upper});
    }
  }
  std::sort(report.thermal.begin(), report.thermal.end(), [](const auto& a, const auto& b) {
    if (a.loading_percent != b.loading_percent) return a.loading_percent > b.loading_percent;
    return a.element_id < b.element_id;
  });
  std::sort(report.voltage.begin(), report.voltage.end(), [](const auto& a, const auto& b) {
    if (a.v_pu != b.v_pu) return a.v_pu < b.v_pu;
    return a.bus_id < b.bus_id;
  });
  return report;
}

std::string bus_voltages_csv(const grid::Network& net, const PfSolution& sol) {
  std::ostringstream out;
  out << "bus,v_pu,theta_rad\n";
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    out << net.buses[i].id << ',' << io::format_number(sol.v_pu[i]) << ','
        << io::format_number(sol.theta_rad[i]) << '\n';
  }
  return out.str();
}

std::string branch_loading_csv(const PfSolution& sol) {
  std::ostringstream out;
  out << "element,loading_percent\n";
  for (const auto& bf : sol.branch_flows) {
    out << bf.element_id << ',' << io::format_number(bf.loading_percent) << '\n';
  }
  return out.str();
}

}  // namespace fpr::pf
