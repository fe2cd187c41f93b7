#pragma once

// Gauss-Seidel power flow built straight from the raw network fields. Shares
// no code with the Newton-Raphson solver besides the data structures.

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "fpr/grid_model.hpp"
#include "fpr/power_flow.hpp"

namespace oracle {

struct GsResult {
  std::vector<std::complex<double>> v;
  std::complex<double> pcc_import_mva;
  bool converged = false;
  int iterations = 0;
};

inline GsResult gauss_seidel(const fpr::grid::Network& net, const fpr::pf::DispatchPoint& dispatch,
                             double tol = 1e-13, int max_iter = 500000) {
  using cd = std::complex<double>;
  const std::size_t n = net.buses.size();
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[net.buses[i].id] = i;

  std::vector<std::vector<cd>> y(n, std::vector<cd>(n, cd(0, 0)));
  auto stamp = [&](std::size_t a, std::size_t b, cd z) {
    const cd ys = 1.0 / z;
    y[a][a] += ys;
    y[b][b] += ys;
    y[a][b] -= ys;
    y[b][a] -= ys;
  };
  for (const auto& l : net.lines) {
    const std::size_t a = idx.at(l.from_bus), b = idx.at(l.to_bus);
    const double kv = net.buses[a].base_kv;
    const double zb = kv * kv / net.base_mva;
    stamp(a, b, cd(l.r_ohm_per_km * l.length_km, l.x_ohm_per_km * l.length_km) / zb / double(l.parallel_count));
  }
  for (const auto& t : net.transformers) {
    stamp(idx.at(t.hv_bus), idx.at(t.lv_bus),
          cd(0.0, t.vk_percent / 100.0 * net.base_mva / t.s_rated_mva / double(t.parallel_count)));
  }

  std::vector<cd> s(n, cd(0, 0));
  for (const auto& u : net.units) {
    auto it = dispatch.setpoints.find(u.id);
    if (it == dispatch.setpoints.end()) continue;
    s[idx.at(u.bus)] += cd(it->second.p_mw, it->second.q_mvar) / net.base_mva;
  }

  std::size_t slack = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (net.buses[i].is_pcc) slack = i;
  }
  GsResult r;
  r.v.assign(n, cd(1.0, 0.0));
  for (int it = 0; it < max_iter; ++it) {
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == slack) continue;
      cd acc = std::conj(s[i]) / std::conj(r.v[i]);
      for (std::size_t k = 0; k < n; ++k) {
        if (k != i) acc -= y[i][k] * r.v[k];
      }
      const cd next = acc / y[i][i];
      delta = std::max(delta, std::abs(next - r.v[i]));
      r.v[i] = next;
    }
    r.iterations = it + 1;
    if (delta < tol) {
      r.converged = true;
      break;
    }
  }
  cd i_slack(0, 0);
  for (std::size_t k = 0; k < n; ++k) i_slack += y[slack][k] * r.v[k];
  // Injection at the slack bus equals import from the upstream grid.
  r.pcc_import_mva = r.v[slack] * std::conj(i_slack) * net.base_mva - s[slack] * net.base_mva;
  return r;
}

}  // namespace oracle
