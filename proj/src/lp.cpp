#include "fpr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fpr/error.hpp"

namespace fpr::lp {

int Problem::add_variable(std::string name, double c, double lo, double hi) {
  names.push_back(std::move(name));
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return static_cast<int>(names.size()) - 1;
}

void Problem::add_row(std::string name, std::string tag, std::vector<std::pair<int, double>> coefs,
                      Sense sense, double rhs) {
  rows.push_back({std::move(name), std::move(tag), std::move(coefs), sense, rhs});
}

int Problem::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_error: return "numerical_error";
  }
  return "?";
}

double objective_value(const Problem& p, const std::vector<double>& x) {
  double v = p.objective_constant;
  for (std::size_t j = 0; j < x.size(); ++j) v += p.cost[j] * x[j];
  return v;
}

double max_violation(const Problem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max({worst, p.lower[j] - x[j], x[j] - p.upper[j]});
  }
  for (const auto& r : p.rows) {
    double lhs = 0.0;
    for (auto [j, a] : r.coefs) lhs += a * x[static_cast<std::size_t>(j)];
    const double d = lhs - r.rhs;
    if (r.sense == Sense::le) worst = std::max(worst, d);
    if (r.sense == Sense::ge) worst = std::max(worst, -d);
    if (r.sense == Sense::eq) worst = std::max(worst, std::abs(d));
  }
  return worst;
}

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// x_j = offset + sign * y_col (- y_col2 for free variables)
struct VarMap {
  double offset = 0.0;
  double sign = 1.0;
  int col = -1;
  int col2 = -1;
};

class Simplex {
 public:
  Simplex(Tableau t, std::vector<int> basis, int n_total, const Options& opt)
      : t_(std::move(t)), basis_(std::move(basis)), n_total_(n_total), opt_(opt) {}

  enum class Result { optimal, unbounded, iteration_limit };

  /// Minimizes cost over columns [0, allowed_cols).
  Result run(const std::vector<double>& cost, int allowed_cols, double cost_scale) {
    const auto m = static_cast<int>(t_.rows());
    const int rhs = n_total_;
    d_ = Eigen::RowVectorXd::Zero(n_total_ + 1);
    for (int j = 0; j < n_total_; ++j) d_(j) = cost[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) {
      const double cb = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
      if (cb != 0.0) d_ -= cb * t_.row(i);
    }
    const double opt_tol = opt_.optimality_tol * std::max(1.0, cost_scale);
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return Result::iteration_limit;
      int enter = -1;
      double best = -opt_tol;
      for (int j = 0; j < allowed_cols; ++j) {
        if (d_(j) < best) {
          enter = j;
          if (bland) break;
          best = d_(j);
        }
      }
      if (enter < 0) return Result::optimal;

      int leave = -1;
      double ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= 1e-9) continue;
        const double r = std::max(0.0, t_(i, rhs)) / a;
        if (leave < 0 || r < ratio - 1e-12 * std::max(1.0, ratio) ||
            (r <= ratio + 1e-12 * std::max(1.0, ratio) &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          ratio = r;
        }
      }
      if (leave < 0) return Result::unbounded;
      if (ratio <= 1e-12) {
        if (++degenerate_run >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(leave, enter);
      ++iterations_;
    }
  }

  void pivot(int r, int e) {
    t_.row(r) /= t_(r, e);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, e);
      if (f != 0.0) {
        t_.row(i) -= f * t_.row(r);
        t_(i, e) = 0.0;
      }
    }
    const double fd = d_(e);
    if (fd != 0.0) {
      d_ -= fd * t_.row(r);
      d_(e) = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = e;
  }

  /// Objective value of the current basis (cost row keeps its negative).
  double objective() const { return -d_(n_total_); }

  Tableau& tableau() { return t_; }
  std::vector<int>& basis() { return basis_; }
  int iterations() const { return iterations_; }

 private:
  Tableau t_;
  std::vector<int> basis_;
  int n_total_;
  Options opt_;
  Eigen::RowVectorXd d_;
  int iterations_ = 0;
};

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  const auto n = p.names.size();
  if (p.cost.size() != n || p.lower.size() != n || p.upper.size() != n) {
    fail(ErrorKind::invalid_argument, "LP: inconsistent variable arrays");
  }
  Solution sol;
  for (std::size_t j = 0; j < n; ++j) {
    if (p.lower[j] > p.upper[j] || p.lower[j] == kInf || p.upper[j] == -kInf) {
      sol.status = Status::infeasible;
      sol.diagnostics = "empty bounds on variable " + p.names[j];
      return sol;
    }
  }

  // Standard form: every column nonnegative.
  std::vector<VarMap> vmap(n);
  int n_struct = 0;
  struct StdRow {
    std::vector<std::pair<int, double>> coefs;
    Sense sense;
    double rhs;
  };
  std::vector<StdRow> rows;
  std::vector<double> c_std;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = p.lower[j];
    const double hi = p.upper[j];
    VarMap& vm = vmap[j];
    if (std::isfinite(lo)) {
      vm = {lo, 1.0, n_struct++, -1};
      c_std.push_back(p.cost[j]);
      if (std::isfinite(hi)) rows.push_back({{{vm.col, 1.0}}, Sense::le, hi - lo});
    } else if (std::isfinite(hi)) {
      vm = {hi, -1.0, n_struct++, -1};
      c_std.push_back(-p.cost[j]);
    } else {
      vm = {0.0, 1.0, n_struct, n_struct + 1};
      n_struct += 2;
      c_std.push_back(p.cost[j]);
      c_std.push_back(-p.cost[j]);
    }
  }
  for (const auto& r : p.rows) {
    StdRow s{{}, r.sense, r.rhs};
    for (auto [j, a] : r.coefs) {
      if (j < 0 || static_cast<std::size_t>(j) >= n) {
        fail(ErrorKind::invalid_argument, "LP: row " + r.name + " references unknown column");
      }
      const VarMap& vm = vmap[static_cast<std::size_t>(j)];
      s.rhs -= a * vm.offset;
      s.coefs.push_back({vm.col, a * vm.sign});
      if (vm.col2 >= 0) s.coefs.push_back({vm.col2, -a});
    }
    rows.push_back(std::move(s));
  }

  const auto m = static_cast<int>(rows.size());
  int n_slack = 0;
  for (const auto& r : rows) n_slack += r.sense == Sense::eq ? 0 : 1;

  // Columns: structural | slack | artificial | rhs
  std::vector<int> basis(static_cast<std::size_t>(m), -1);
  std::vector<double> row_sign(static_cast<std::size_t>(m), 1.0);
  int n_art = 0;
  std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
  {
    int s = n_struct;
    for (int i = 0; i < m; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      if (r.sense != Sense::eq) slack_col[static_cast<std::size_t>(i)] = s++;
      if (r.rhs < 0) row_sign[static_cast<std::size_t>(i)] = -1.0;
      const double slack_coef = (r.sense == Sense::le ? 1.0 : -1.0) * row_sign[static_cast<std::size_t>(i)];
      if (r.sense != Sense::eq && slack_coef > 0) {
        basis[static_cast<std::size_t>(i)] = slack_col[static_cast<std::size_t>(i)];
      } else {
        ++n_art;
      }
    }
  }
  const int n_total = n_struct + n_slack + n_art;
  Tableau t = Tableau::Zero(m, n_total + 1);
  {
    int a = n_struct + n_slack;
    for (int i = 0; i < m; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      const double sg = row_sign[static_cast<std::size_t>(i)];
      for (auto [col, v] : r.coefs) t(i, col) += sg * v;
      if (slack_col[static_cast<std::size_t>(i)] >= 0) {
        t(i, slack_col[static_cast<std::size_t>(i)]) = sg * (r.sense == Sense::le ? 1.0 : -1.0);
      }
      t(i, n_total) = sg * r.rhs;
      if (basis[static_cast<std::size_t>(i)] < 0) {
        t(i, a) = 1.0;
        basis[static_cast<std::size_t>(i)] = a++;
      }
    }
  }

  double cost_scale = 0.0;
  for (double c : c_std) cost_scale = std::max(cost_scale, std::abs(c));
  double rhs_scale = 1.0;
  for (const auto& r : rows) rhs_scale = std::max(rhs_scale, std::abs(r.rhs));

  Simplex sx(std::move(t), std::move(basis), n_total, opt);
  const int first_art = n_struct + n_slack;
  if (n_art > 0) {
    std::vector<double> c1(static_cast<std::size_t>(n_total), 0.0);
    for (int j = first_art; j < n_total; ++j) c1[static_cast<std::size_t>(j)] = 1.0;
    const auto r1 = sx.run(c1, n_total, 1.0);
    if (r1 == Simplex::Result::iteration_limit) {
      sol.diagnostics = "iteration limit in phase 1";
      sol.iterations = sx.iterations();
      return sol;
    }
    if (sx.objective() > 1e-7 * rhs_scale) {
      sol.status = Status::infeasible;
      sol.iterations = sx.iterations();
      sol.diagnostics = "phase 1 residual " + std::to_string(sx.objective());
      return sol;
    }
    // Drive remaining artificials out; rows without a pivot are redundant.
    auto& tab = sx.tableau();
    auto& bas = sx.basis();
    for (int i = 0; i < m; ++i) {
      if (bas[static_cast<std::size_t>(i)] < first_art) continue;
      int best = -1;
      for (int j = 0; j < first_art; ++j) {
        if (std::abs(tab(i, j)) > 1e-7 && (best < 0 || std::abs(tab(i, j)) > std::abs(tab(i, best)))) {
          best = j;
        }
      }
      if (best >= 0) sx.pivot(i, best);
    }
  }

  std::vector<double> c2(static_cast<std::size_t>(n_total), 0.0);
  std::copy(c_std.begin(), c_std.end(), c2.begin());
  const auto r2 = sx.run(c2, first_art, cost_scale);
  sol.iterations = sx.iterations();
  if (r2 == Simplex::Result::iteration_limit) {
    sol.diagnostics = "iteration limit in phase 2";
    return sol;
  }
  if (r2 == Simplex::Result::unbounded) {
    sol.status = Status::unbounded;
    sol.diagnostics = "objective unbounded below";
    return sol;
  }

  std::vector<double> y(static_cast<std::size_t>(n_total), 0.0);
  const auto& tab = sx.tableau();
  for (int i = 0; i < m; ++i) {
    y[static_cast<std::size_t>(sx.basis()[static_cast<std::size_t>(i)])] = tab(i, n_total);
  }
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const VarMap& vm = vmap[j];
    double v = vm.offset + vm.sign * y[static_cast<std::size_t>(vm.col)];
    if (vm.col2 >= 0) v -= y[static_cast<std::size_t>(vm.col2)];
    // Bound rows are satisfied up to round-off; snap onto the box.
    if (std::isfinite(p.lower[j])) v = std::max(v, p.lower[j]);
    if (std::isfinite(p.upper[j])) v = std::min(v, p.upper[j]);
    sol.x[j] = v;
  }
  sol.objective = objective_value(p, sol.x);
  sol.max_violation = max_violation(p, sol.x);
  if (sol.max_violation > 1e-6 * rhs_scale) {
    sol.status = Status::numerical_error;
    sol.diagnostics = "primal residual " + std::to_string(sol.max_violation) + " after " +
                      std::to_string(sol.iterations) + " pivots";
    return sol;
  }
  sol.status = Status::optimal;
  return sol;
}

}  // namespace fpr::lp
