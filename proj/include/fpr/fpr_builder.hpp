#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpr/expansion.hpp"
#include "fpr/for_engine.hpp"
#include "fpr/grid_model.hpp"
#include "fpr/io.hpp"

namespace fpr::builder {

struct GridClass {
  grid::VoltageLevel voltage_level = grid::VoltageLevel::lv;
  grid::Urbanization urbanization = grid::Urbanization::rural;

  friend bool operator==(const GridClass&, const GridClass&) = default;
};

GridClass grid_class_of(const grid::Network& net);

/// One expansion stage placed on the cost axis.
struct FprEntry {
  double cost = 0.0;
  region::ForPolygon polygon;
  int stage_ref = 0;
  double scale_factor = 1.0;
};

/// Feasible planning region: FORs ordered by strictly increasing cost.
struct Fpr {
  std::string grid_id;
  GridClass grid_class;
  std::vector<FprEntry> entries;
};

/// Input to assembly: a stage's cost and class with its FOR.
struct StageRegion {
  std::string grid_id;
  GridClass grid_class;
  double cost = 0.0;
  int stage_ref = 0;
  double scale_factor = 1.0;
  region::ForPolygon polygon;
};

StageRegion stage_region(const expansion::ExpansionStage& stage, region::ForPolygon polygon);

/// True when two costs agree within 1e-6 relative (absolute below 1).
bool same_cost(double a, double b);

/// Sorts by cost; equal-cost groups keep the largest polygon (lowest
/// stage_ref on an exact area tie).
Fpr assemble(std::span<const StageRegion> stages);

enum class CapacityMetric { max_abs_p, max_apparent };
const char* to_string(CapacityMetric metric);
CapacityMetric parse_capacity_metric(const std::string& text);

/// Capacity R of a polygon under the metric.
double capacity(const region::ForPolygon& polygon, CapacityMetric metric);

struct LinearizeOptions {
  CapacityMetric metric = CapacityMetric::max_abs_p;
  double opex_per_mwh = 0.0;
};

struct LinearFprModel {
  std::string grid_id;
  CapacityMetric metric = CapacityMetric::max_abs_p;
  double capex_per_mw = 0.0;
  double base_cost = 0.0;
  double m_min_mw = 0.0;
  double m_max_mw = 0.0;
  double f_min_pu = 0.0;
  double f_max_pu = 0.0;
  double opex_per_mwh = 0.0;
  double r_squared = 1.0;
  bool degenerate = false;
  std::string warning;
};

/// Least-squares line cost = a*R + b restricted to a >= 0, b >= 0.
struct LineFit {
  double a = 0.0;
  double b = 0.0;
  double sse = 0.0;
};
LineFit fit_nonnegative_line(std::span<const double> x, std::span<const double> y);

LinearFprModel linearize(const Fpr& fpr, const LinearizeOptions& options = {});

enum class ChildSelection { by_scale, largest };
const char* to_string(ChildSelection selection);
ChildSelection parse_child_selection(const std::string& text);

/// Entry chosen for embedding: by_scale takes the entry of matching scale
/// factor, else the largest scale factor below it, else entry 0.
const FprEntry& select_entry(const Fpr& fpr, ChildSelection selection, double scale_factor);

/// Adds an equivalent unit for the child grid at attach_bus. The child's PCC
/// import polygon is mirrored into the parent's injection convention.
grid::Network embed_child(const grid::Network& parent, const Fpr& child,
                          const std::string& attach_bus, ChildSelection selection,
                          double scale_factor = 1.0);

Json fpr_to_json(const Fpr& fpr);
Fpr fpr_from_json(const Json& doc, const std::string& source);
Json linear_model_to_json(const LinearFprModel& model);
LinearFprModel linear_model_from_json(const Json& doc, const std::string& source);
/// `cost,area,R` per entry.
std::string fpr_curve_csv(const Fpr& fpr, CapacityMetric metric = CapacityMetric::max_abs_p);

}  // namespace fpr::builder
