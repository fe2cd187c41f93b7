#include "fpr/for_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fpr/error.hpp"
#include "fpr/parallel.hpp"

namespace fpr::region {

namespace {

constexpr int kMaxMatchIterations = 40;

std::vector<double> electrical_distance(const grid::Network& net) {
  const std::size_t n = net.buses.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& l : net.lines) {
    const auto a = *net.bus_index(l.from_bus);
    const auto b = *net.bus_index(l.to_bus);
    const double w = std::abs(grid::line_impedance_pu(net, l));
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  }
  for (const auto& t : net.transformers) {
    const auto a = *net.bus_index(t.hv_bus);
    const auto b = *net.bus_index(t.lv_bus);
    const double w = std::abs(grid::transformer_impedance_pu(net, t));
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> done(n, false);
  dist[net.pcc_index()] = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && std::isfinite(dist[i]) && (u == n || dist[i] < dist[u])) u = i;
    }
    if (u == n) break;
    done[u] = true;
    for (auto [v, w] : adj[u]) dist[v] = std::min(dist[v], dist[u] + w);
  }
  return dist;
}

}  // namespace

double grid_peak_mw(const grid::Network& net) {
  double gen = 0.0;
  double load = 0.0;
  for (const auto& u : net.units) {
    gen += std::max(0.0, u.p_max_mw);
    load += std::max(0.0, -u.p_min_mw);
  }
  return std::max(gen, load);
}

double default_tolerance_mw(const grid::Network& net) {
  const double peak = grid_peak_mw(net);
  return peak > 0 ? 0.01 * peak : 1e-6;
}

FeasibilityOracle::FeasibilityOracle(const grid::Network& net, double tolerance_mw,
                                     const expansion::UseCaseConfig& use_cases)
    : net_(net), model_(net_), tol_(tolerance_mw), match_tol_(1e-3 * tolerance_mw) {
  if (!(tolerance_mw > 0)) fail(ErrorKind::invalid_argument, "bisection tolerance must be positive");
  double abs_sum = 0.0;
  for (const auto& u : net_.units) {
    UnitRange r{u.p_min_mw, u.p_max_mw, u.q_min_mvar, u.q_max_mvar, nullptr};
    if (u.kind == grid::UnitKind::equivalent_fpr && !u.pq_polygon.empty()) {
      const auto box = geometry::bounding_box(u.pq_polygon);
      r = {box.p_min, box.p_max, box.q_min, box.q_max, &u.pq_polygon};
    }
    ranges_.push_back(r);
    p_range_ += r.p_hi - r.p_lo;
    q_range_ += r.q_hi - r.q_lo;
    p_lo_sum_ += r.p_lo;
    p_hi_sum_ += r.p_hi;
    q_lo_sum_ += r.q_lo;
    q_hi_sum_ += r.q_hi;
    abs_sum += std::max(std::abs(r.p_lo), std::abs(r.p_hi)) +
               std::max(std::abs(r.q_lo), std::abs(r.q_hi));
  }
  outer_ = 2.0 * abs_sum + 10.0 * tol_;

  const auto dist = electrical_distance(net_);
  nearest_order_.resize(net_.units.size());
  for (std::size_t i = 0; i < nearest_order_.size(); ++i) nearest_order_[i] = i;
  const auto& unit_bus = model_.unit_bus();
  std::stable_sort(nearest_order_.begin(), nearest_order_.end(),
                   [&](std::size_t a, std::size_t b) { return dist[unit_bus[a]] < dist[unit_bus[b]]; });

  const expansion::UseCase cases[2] = {expansion::UseCase::high_load,
                                       expansion::UseCase::high_feed_in};
  for (int k = 0; k < 2; ++k) {
    const auto d = expansion::use_case_dispatch(net_, cases[k], use_cases);
    const auto sol = model_.solve(d);
    if (!sol.converged) continue;
    anchor_point_[k] = Point{sol.pcc_p_mw, sol.pcc_q_mvar};
    if (pf::check_violations(net_, sol).empty()) anchor_dispatch_[k] = d;
  }
}

std::vector<pf::Setpoint> FeasibilityOracle::allocate(Family family, double lambda,
                                                      double mu) const {
  const std::size_t n = ranges_.size();
  std::vector<pf::Setpoint> sp(n);
  if (family == Family::proportional) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = ranges_[i];
      sp[i] = {r.p_lo + lambda * (r.p_hi - r.p_lo), r.q_lo + mu * (r.q_hi - r.q_lo)};
    }
  } else {
    double p_left = lambda * p_range_;
    double q_left = mu * q_range_;
    for (std::size_t i : nearest_order_) {
      const auto& r = ranges_[i];
      const double dp = std::min(p_left, r.p_hi - r.p_lo);
      const double dq = std::min(q_left, r.q_hi - r.q_lo);
      p_left -= dp;
      q_left -= dq;
      sp[i] = {r.p_lo + dp, r.q_lo + dq};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (ranges_[i].polygon) {
      const Point c = geometry::clip_to_polygon(*ranges_[i].polygon, {sp[i].p_mw, sp[i].q_mvar});
      sp[i] = {c.p_mw, c.q_mvar};
    }
  }
  return sp;
}

pf::DispatchPoint FeasibilityOracle::to_dispatch(const std::vector<pf::Setpoint>& sp) const {
  pf::DispatchPoint d;
  for (std::size_t i = 0; i < sp.size(); ++i) d.setpoints[net_.units[i].id] = sp[i];
  return d;
}

std::optional<std::vector<pf::Setpoint>> FeasibilityOracle::solve_family(Family family,
                                                                         Point target) const {
  // PCC import falls as injection rises: dP_pcc/dlambda is about -p_range_.
  const bool p_free = p_range_ > 1e-12;
  const bool q_free = q_range_ > 1e-12;
  double lambda = p_free ? std::clamp((-target.p_mw - p_lo_sum_) / p_range_, 0.0, 1.0) : 0.0;
  double mu = q_free ? std::clamp((-target.q_mvar - q_lo_sum_) / q_range_, 0.0, 1.0) : 0.0;
  double slope_p = p_range_;
  double slope_q = q_range_;

  std::vector<pf::Setpoint> sp;
  pf::PfSolution sol;
  double prev_lambda = 0.0, prev_mu = 0.0, prev_p = 0.0, prev_q = 0.0;
  bool have_prev = false;
  double err_p = 0.0, err_q = 0.0;
  for (int it = 0; it < kMaxMatchIterations; ++it) {
    sp = allocate(family, lambda, mu);
    sol = model_.solve_units(sp);
    if (!sol.converged) return std::nullopt;
    err_p = sol.pcc_p_mw - target.p_mw;
    err_q = sol.pcc_q_mvar - target.q_mvar;
    if (std::abs(err_p) <= match_tol_ && std::abs(err_q) <= match_tol_) break;

    if (have_prev) {
      const double dl = lambda - prev_lambda;
      const double dm = mu - prev_mu;
      if (std::abs(dl) > 1e-9) {
        const double s = -(sol.pcc_p_mw - prev_p) / dl;
        if (s > 0.2 * p_range_ && s < 5.0 * p_range_) slope_p = s;
      }
      if (std::abs(dm) > 1e-9) {
        const double s = -(sol.pcc_q_mvar - prev_q) / dm;
        if (s > 0.2 * q_range_ && s < 5.0 * q_range_) slope_q = s;
      }
    }
    const double next_lambda = p_free ? std::clamp(lambda + err_p / slope_p, 0.0, 1.0) : lambda;
    const double next_mu = q_free ? std::clamp(mu + err_q / slope_q, 0.0, 1.0) : mu;
    if (next_lambda == lambda && next_mu == mu) break;  // pinned at the family bounds
    prev_lambda = lambda;
    prev_mu = mu;
    prev_p = sol.pcc_p_mw;
    prev_q = sol.pcc_q_mvar;
    have_prev = true;
    lambda = next_lambda;
    mu = next_mu;
  }
  if (std::abs(err_p) > tol_ || std::abs(err_q) > tol_) return std::nullopt;
  if (!pf::check_violations(net_, sol).empty()) return std::nullopt;
  return sp;
}

std::optional<pf::DispatchPoint> FeasibilityOracle::feasible(Point target) const {
  for (int k = 0; k < 2; ++k) {
    if (anchor_dispatch_[k] && std::abs(anchor_point_[k]->p_mw - target.p_mw) <= match_tol_ &&
        std::abs(anchor_point_[k]->q_mvar - target.q_mvar) <= match_tol_) {
      return anchor_dispatch_[k];
    }
  }
  // Series losses only add to the import, so full injection bounds it below.
  if (target.p_mw < -p_hi_sum_ - tol_ || target.q_mvar < -q_hi_sum_ - tol_) return std::nullopt;
  for (Family f : {Family::proportional, Family::nearest_first}) {
    if (auto sp = solve_family(f, target)) return to_dispatch(*sp);
  }
  return std::nullopt;
}

std::optional<pf::DispatchPoint> feasible(const grid::Network& net, Point target,
                                          const SweepConfig& cfg) {
  const FeasibilityOracle oracle(net, cfg.bisection_tol_mw.value_or(default_tolerance_mw(net)),
                                 cfg.use_cases);
  return oracle.feasible(target);
}

ForPolygon compute_for(const grid::Network& net, const SweepConfig& cfg) {
  if (cfg.n_directions < 8) fail(ErrorKind::invalid_argument, "n_directions must be >= 8");
  if (cfg.max_bisection_steps < 1) {
    fail(ErrorKind::invalid_argument, "max_bisection_steps must be >= 1");
  }
  const double tol = cfg.bisection_tol_mw.value_or(default_tolerance_mw(net));
  const FeasibilityOracle oracle(net, tol, cfg.use_cases);

  const auto hl = oracle.high_load_point();
  const auto hf = oracle.high_feed_in_point();
  if (!hl || !hf) {
    fail(ErrorKind::infeasible,
         "grid use cases of '" + net.id + "' do not converge; no FOR base point");
  }
  // Loss-free midpoint first: it depends on the units only, so stages of one
  // supply task share their sweep frame and nested regions give nested rays.
  Point lossless{0.0, 0.0};
  for (auto uc : {expansion::UseCase::high_load, expansion::UseCase::high_feed_in}) {
    for (const auto& [id, sp] : expansion::use_case_dispatch(net, uc, cfg.use_cases).setpoints) {
      lossless.p_mw -= 0.5 * sp.p_mw;
      lossless.q_mvar -= 0.5 * sp.q_mvar;
    }
  }
  Point base = lossless;
  std::optional<pf::DispatchPoint> base_dispatch = oracle.feasible(base);
  const Point mid{0.5 * (hl->p_mw + hf->p_mw), 0.5 * (hl->q_mvar + hf->q_mvar)};
  if (!base_dispatch) {
    base = mid;
    base_dispatch = oracle.feasible(mid);
  }
  for (const Point end : {*hl, *hf}) {
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      if (base_dispatch) break;
      base = {mid.p_mw + t * (end.p_mw - mid.p_mw), mid.q_mvar + t * (end.q_mvar - mid.q_mvar)};
      base_dispatch = oracle.feasible(base);
    }
  }
  if (!base_dispatch) {
    fail(ErrorKind::infeasible, "no feasible FOR base point for '" + net.id + "'");
  }

  const auto n = static_cast<std::size_t>(cfg.n_directions);
  ForPolygon out;
  out.base_point = base;
  out.tolerance_mw = tol;
  out.vertices.resize(n);
  out.theta_deg.resize(n);
  out.certificates.resize(n);
  const double s_outer = oracle.outer_radius();

  parallel_for(n, cfg.jobs, [&](std::size_t k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const double dp = std::cos(theta);
    const double dq = std::sin(theta);
    auto at = [&](double s) { return Point{base.p_mw + s * dp, base.q_mvar + s * dq}; };

    double lo = 0.0;
    double hi = s_outer;
    pf::DispatchPoint cert = *base_dispatch;
    if (auto d = oracle.feasible(at(hi))) {
      lo = hi;
      cert = std::move(*d);
    } else {
      for (int step = 0; step < cfg.max_bisection_steps && hi - lo > tol; ++step) {
        const double s = 0.5 * (lo + hi);
        if (auto d2 = oracle.feasible(at(s))) {
          lo = s;
          cert = std::move(*d2);
        } else {
          hi = s;
        }
      }
    }
    out.vertices[k] = at(lo);
    out.theta_deg[k] = 360.0 * static_cast<double>(k) / static_cast<double>(n);
    out.certificates[k] = {std::move(cert), hi - lo};
  });
  out.area_mva2 = geometry::signed_area(out.vertices);
  return out;
}

bool certificate_holds(const grid::Network& net, const pf::DispatchPoint& dispatch, Point vertex,
                       double tolerance_mw, std::string* reason) {
  auto why = [&](const std::string& r) {
    if (reason) *reason = r;
    return false;
  };
  constexpr double eps = 1e-9;
  for (const auto& u : net.units) {
    auto it = dispatch.setpoints.find(u.id);
    if (it == dispatch.setpoints.end()) return why("missing setpoint for " + u.id);
    const auto& s = it->second;
    if (!u.pq_polygon.empty()) {
      if (!geometry::contains(u.pq_polygon, {s.p_mw, s.q_mvar}, 1e-7)) {
        return why(u.id + " outside its child polygon");
      }
    } else if (s.p_mw < u.p_min_mw - eps || s.p_mw > u.p_max_mw + eps ||
               s.q_mvar < u.q_min_mvar - eps || s.q_mvar > u.q_max_mvar + eps) {
      return why(u.id + " outside its range");
    }
  }
  const auto sol = pf::solve(net, dispatch);
  if (!sol.converged) return why("power flow does not converge");
  if (!pf::check_violations(net, sol).empty()) return why("violations at certificate dispatch");
  if (std::abs(sol.pcc_p_mw - vertex.p_mw) > tolerance_mw ||
      std::abs(sol.pcc_q_mvar - vertex.q_mvar) > tolerance_mw) {
    return why("PCC exchange differs from vertex");
  }
  return true;
}

Json for_to_json(const ForPolygon& polygon) {
  Json vertices = Json::array();
  for (const auto& v : polygon.vertices) {
    vertices.push_back(Json{{"p_mw", v.p_mw}, {"q_mvar", v.q_mvar}});
  }
  return Json{{"vertices", std::move(vertices)},
              {"base_point",
               Json{{"p_mw", polygon.base_point.p_mw}, {"q_mvar", polygon.base_point.q_mvar}}},
              {"area", polygon.area_mva2},
              {"tolerance_mw", polygon.tolerance_mw}};
}

ForPolygon for_from_json(const Json& doc, const std::string& source) {
  io::require_keys_subset(doc, {"vertices", "base_point", "area", "tolerance_mw"}, source);
  ForPolygon out;
  const Json& vs = io::require_field(doc, "vertices", source);
  if (!vs.is_array()) fail(ErrorKind::schema, source + ".vertices: expected an array");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string w = source + ".vertices[" + std::to_string(i) + "]";
    out.vertices.push_back({io::number_field(vs[i], "p_mw", w), io::number_field(vs[i], "q_mvar", w)});
    out.theta_deg.push_back(360.0 * static_cast<double>(i) / static_cast<double>(vs.size()));
  }
  const Json& bp = io::require_field(doc, "base_point", source);
  out.base_point = {io::number_field(bp, "p_mw", source + ".base_point"),
                    io::number_field(bp, "q_mvar", source + ".base_point")};
  out.area_mva2 = io::number_field(doc, "area", source);
  out.tolerance_mw = io::number_or(doc, "tolerance_mw", 0.0, source);
  return out;
}

std::string for_to_csv(const ForPolygon& polygon) {
  std::ostringstream out;
  out << "theta_deg,p_mw,q_mvar\n";
  for (std::size_t i = 0; i < polygon.vertices.size(); ++i) {
    out << io::format_number(polygon.theta_deg[i]) << ',' << io::format_number(polygon.vertices[i].p_mw)
        << ',' << io::format_number(polygon.vertices[i].q_mvar) << '\n';
  }
  return out.str();
}

}  // namespace fpr::region
