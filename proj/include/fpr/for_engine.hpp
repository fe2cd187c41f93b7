#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpr/expansion.hpp"
#include "fpr/geometry.hpp"
#include "fpr/grid_model.hpp"
#include "fpr/io.hpp"
#include "fpr/power_flow.hpp"

namespace fpr::region {

using geometry::Point;

struct SweepConfig {
  int n_directions = 36;
  /// Defaults to 1% of the grid peak (see grid_peak_mw).
  std::optional<double> bisection_tol_mw;
  int max_bisection_steps = 40;
  /// Worker threads for the direction sweep; 0 = all cores.
  int jobs = 1;
  expansion::UseCaseConfig use_cases;
};

struct VertexCertificate {
  pf::DispatchPoint dispatch;
  double bisection_gap_mw = 0.0;
};

/// Feasible operation region as a star-shaped polygon around base_point,
/// vertices counterclockwise (one per sweep direction).
struct ForPolygon {
  std::vector<Point> vertices;
  std::vector<double> theta_deg;
  Point base_point;
  std::vector<VertexCertificate> certificates;
  double area_mva2 = 0.0;
  double tolerance_mw = 0.0;
};

/// Larger of total generation capacity and total consumption capacity,
/// including the active-power extent of embedded child grids.
double grid_peak_mw(const grid::Network& net);
double default_tolerance_mw(const grid::Network& net);

/// Decides whether some unit dispatch realizes a PCC exchange without
/// thermal or voltage violations.
///
/// Dispatches are searched along one-parameter families: active setpoints
/// move jointly from all-minimum to all-maximum injection and reactive
/// setpoints likewise, either proportionally to each unit's range or filling
/// units in order of electrical distance from the PCC. The two family
/// parameters are driven by a secant iteration until the power-flow PCC
/// exchange matches the target. Equivalent child-grid units are clipped onto
/// their polygon. Every returned dispatch has been checked with a full AC
/// power flow.
class FeasibilityOracle {
 public:
  FeasibilityOracle(const grid::Network& net, double tolerance_mw,
                    const expansion::UseCaseConfig& use_cases = {});

  std::optional<pf::DispatchPoint> feasible(Point target) const;

  double tolerance_mw() const { return tol_; }
  /// PCC exchange of the two grid use cases, when their power flow converges.
  std::optional<Point> high_load_point() const { return anchor_point_[0]; }
  std::optional<Point> high_feed_in_point() const { return anchor_point_[1]; }
  /// Radius bounding every reachable PCC exchange around any interior point.
  double outer_radius() const { return outer_; }

 private:
  enum class Family { proportional, nearest_first };

  std::vector<pf::Setpoint> allocate(Family family, double lambda, double mu) const;
  std::optional<std::vector<pf::Setpoint>> solve_family(Family family, Point target) const;
  pf::DispatchPoint to_dispatch(const std::vector<pf::Setpoint>& sp) const;

  grid::Network net_;
  pf::PowerFlowModel model_;
  double tol_;
  double match_tol_;
  struct UnitRange {
    double p_lo, p_hi, q_lo, q_hi;
    const std::vector<Point>* polygon;
  };
  std::vector<UnitRange> ranges_;
  std::vector<std::size_t> nearest_order_;
  double p_range_ = 0.0;
  double q_range_ = 0.0;
  double p_lo_sum_ = 0.0;
  double q_lo_sum_ = 0.0;
  double p_hi_sum_ = 0.0;
  double q_hi_sum_ = 0.0;
  double outer_ = 0.0;
  std::optional<Point> anchor_point_[2];
  std::optional<pf::DispatchPoint> anchor_dispatch_[2];  // set only when violation-free
};

std::optional<pf::DispatchPoint> feasible(const grid::Network& net, Point target,
                                          const SweepConfig& cfg = {});

/// Direction sweep with bisection on every ray from the base point: the
/// loss-free midpoint of the two use-case dispatches, else the midpoint of
/// their power-flow PCC exchanges, else points on the segments towards those
/// exchanges.
ForPolygon compute_for(const grid::Network& net, const SweepConfig& cfg = {});

/// Independent re-check of a vertex certificate with the power flow alone.
bool certificate_holds(const grid::Network& net, const pf::DispatchPoint& dispatch, Point vertex,
                       double tolerance_mw, std::string* reason = nullptr);

Json for_to_json(const ForPolygon& polygon);
ForPolygon for_from_json(const Json& doc, const std::string& source);
/// `theta_deg,p_mw,q_mvar`, one row per vertex.
std::string for_to_csv(const ForPolygon& polygon);

}  // namespace fpr::region
