#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fpr::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };

struct Row {
  std::string name;
  /// Origin of the row (e.g. balance, capacity, link) for diagnostics.
  std::string tag;
  std::vector<std::pair<int, double>> coefs;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

/// min cost.x + objective_constant subject to rows and variable bounds.
struct Problem {
  std::vector<std::string> names;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;
  double objective_constant = 0.0;

  int add_variable(std::string name, double cost, double lower = 0.0, double upper = kInf);
  void add_row(std::string name, std::string tag, std::vector<std::pair<int, double>> coefs,
               Sense sense, double rhs);
  int variable_count() const { return static_cast<int>(names.size()); }
  /// Index of a named variable, -1 when absent.
  int find(const std::string& name) const;
};

enum class Status { optimal, infeasible, unbounded, numerical_error };
const char* to_string(Status status);

struct Solution {
  Status status = Status::numerical_error;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
  /// Largest bound or row violation of x (absolute).
  double max_violation = 0.0;
  std::string diagnostics;
};

struct Options {
  int max_iterations = 200000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 50;
};

/// Dense two-phase primal simplex.
Solution solve(const Problem& problem, const Options& options = {});

double objective_value(const Problem& problem, const std::vector<double>& x);
double max_violation(const Problem& problem, const std::vector<double>& x);

/// CPLEX LP text. Output depends only on the problem, in insertion order.
std::string to_lp_text(const Problem& problem);
Problem from_lp_text(const std::string& text);

}  // namespace fpr::lp
