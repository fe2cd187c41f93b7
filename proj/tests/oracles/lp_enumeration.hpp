#pragma once

// Brute-force LP reference: every basic solution of the bound-and-row system
// is enumerated; the best feasible one is optimal when the feasible set is a
// nonempty polytope (all bounds finite, or costs pushing towards finite ones).

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fpr/lp.hpp"

namespace oracle {

struct EnumResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;
  long bases_tried = 0;
};

inline EnumResult enumerate_vertices(const fpr::lp::Problem& p, double feas_tol = 1e-7) {
  const int n = static_cast<int>(p.variable_count());
  // Hyperplanes a.x = b; equality rows are always active.
  struct Plane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Plane> must, optional;
  for (const auto& r : p.rows) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [j, v] : r.coefs) a[j] += v;
    (r.sense == fpr::lp::Sense::eq ? must : optional).push_back({a, r.rhs});
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    if (std::isfinite(p.lower[j])) optional.push_back({e, p.lower[j]});
    if (std::isfinite(p.upper[j])) optional.push_back({e, p.upper[j]});
  }

  auto feasible = [&](const Eigen::VectorXd& x) {
    for (int j = 0; j < n; ++j) {
      if (x[j] < p.lower[j] - feas_tol || x[j] > p.upper[j] + feas_tol) return false;
    }
    for (const auto& r : p.rows) {
      double lhs = 0.0;
      for (const auto& [j, v] : r.coefs) lhs += v * x[j];
      const double scale = feas_tol * std::max(1.0, std::abs(r.rhs));
      if (r.sense == fpr::lp::Sense::le && lhs > r.rhs + scale) return false;
      if (r.sense == fpr::lp::Sense::ge && lhs < r.rhs - scale) return false;
      if (r.sense == fpr::lp::Sense::eq && std::abs(lhs - r.rhs) > scale) return false;
    }
    return true;
  };

  EnumResult out;
  const int k = n - static_cast<int>(must.size());
  if (k < 0 || k > static_cast<int>(optional.size())) return out;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  const int m = static_cast<int>(optional.size());
  while (true) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    int row = 0;
    for (const auto& pl : must) {
      a.row(row) = pl.a.transpose();
      b[row++] = pl.b;
    }
    for (int i : pick) {
      a.row(row) = optional[i].a.transpose();
      b[row++] = optional[i].b;
    }
    ++out.bases_tried;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == n) {
      const Eigen::VectorXd x = lu.solve(b);
      if (feasible(x)) {
        double obj = p.objective_constant;
        for (int j = 0; j < n; ++j) obj += p.cost[j] * x[j];
        if (!out.feasible || obj < out.objective) {
          out.feasible = true;
          out.objective = obj;
          out.x.assign(x.data(), x.data() + n);
        }
      }
    }
    // next combination
    int i = k - 1;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int t = i + 1; t < k; ++t) pick[t] = pick[t - 1] + 1;
  }
  return out;
}

}  // namespace oracle
