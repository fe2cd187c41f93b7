#include "fpr/fpr_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fpr/error.hpp"
#include "fpr/geometry.hpp"

namespace fpr::builder {

GridClass grid_class_of(const grid::Network& net) { return {net.grid_level(), net.urbanization}; }

StageRegion stage_region(const expansion::ExpansionStage& stage, region::ForPolygon polygon) {
  return {stage.network.id,         grid_class_of(stage.network), stage.total_cost,
          stage.scenario_id,        stage.scale_factor,           std::move(polygon)};
}

bool same_cost(double a, double b) {
  return std::abs(a - b) <= 1e-6 * std::max({std::abs(a), std::abs(b), 1.0});
}

Fpr assemble(std::span<const StageRegion> stages) {
  if (stages.empty()) fail(ErrorKind::invalid_argument, "assemble: no expansion stages");
  for (const auto& s : stages) {
    if (!(s.grid_class == stages.front().grid_class)) {
      fail(ErrorKind::invalid_argument, "assemble: stages of stage " + std::to_string(s.stage_ref) +
                                            " belong to a different grid class");
    }
  }
  std::vector<const StageRegion*> order;
  for (const auto& s : stages) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const StageRegion* a, const StageRegion* b) {
    if (a->cost != b->cost) return a->cost < b->cost;
    return a->stage_ref < b->stage_ref;
  });

  Fpr out;
  out.grid_id = stages.front().grid_id;
  out.grid_class = stages.front().grid_class;
  std::size_t i = 0;
  while (i < order.size()) {
    const double group_cost = order[i]->cost;
    const StageRegion* best = order[i];
    double best_area = geometry::area(best->polygon.vertices);
    std::size_t j = i + 1;
    for (; j < order.size() && same_cost(order[j]->cost, group_cost); ++j) {
      const double a = geometry::area(order[j]->polygon.vertices);
      if (a > best_area || (a == best_area && order[j]->stage_ref < best->stage_ref)) {
        best = order[j];
        best_area = a;
      }
    }
    out.entries.push_back({best->cost, best->polygon, best->stage_ref, best->scale_factor});
    i = j;
  }
  return out;
}

const char* to_string(CapacityMetric metric) {
  return metric == CapacityMetric::max_abs_p ? "max_abs_p" : "max_apparent";
}

CapacityMetric parse_capacity_metric(const std::string& text) {
  if (text == "max_abs_p") return CapacityMetric::max_abs_p;
  if (text == "max_apparent") return CapacityMetric::max_apparent;
  fail(ErrorKind::invalid_argument, "unknown capacity metric '" + text + "'");
}

double capacity(const region::ForPolygon& polygon, CapacityMetric metric) {
  double r = 0.0;
  for (const auto& v : polygon.vertices) {
    r = std::max(r, metric == CapacityMetric::max_abs_p ? std::abs(v.p_mw)
                                                        : std::hypot(v.p_mw, v.q_mvar));
  }
  return r;
}

LineFit fit_nonnegative_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - a * x[i] - b;
      s += r * r;
    }
    return s;
  };
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  // The convex quadratic over the orthant attains its minimum on one of the
  // four faces; each face minimizer is closed form.
  std::vector<std::pair<double, double>> candidates{{0.0, 0.0}};
  if (n > 0) candidates.push_back({0.0, std::max(0.0, sy / n)});
  if (sxx > 0) candidates.push_back({std::max(0.0, sxy / sxx), 0.0});
  const double det = n * sxx - sx * sx;
  if (det > 1e-12 * std::max(1.0, n * sxx)) {
    const double a = (n * sxy - sx * sy) / det;
    const double b = (sy - a * sx) / n;
    if (a >= 0 && b >= 0) candidates.push_back({a, b});
  }
  LineFit best{0, 0, std::numeric_limits<double>::infinity()};
  for (auto [a, b] : candidates) {
    const double s = sse(a, b);
    if (s < best.sse) best = {a, b, s};
  }
  return best;
}

LinearFprModel linearize(const Fpr& fpr, const LinearizeOptions& options) {
  if (fpr.entries.empty()) fail(ErrorKind::invalid_argument, "linearize: empty FPR");
  LinearFprModel m;
  m.grid_id = fpr.grid_id;
  m.metric = options.metric;
  m.opex_per_mwh = options.opex_per_mwh;

  std::vector<double> r, c;
  for (const auto& e : fpr.entries) {
    r.push_back(capacity(e.polygon, options.metric));
    c.push_back(e.cost);
  }
  m.m_min_mw = *std::min_element(r.begin(), r.end());
  m.m_max_mw = *std::max_element(r.begin(), r.end());

  const auto largest = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  const double big = r[largest];
  if (big > 0) {
    double p_lo = 0.0, p_hi = 0.0;
    for (const auto& v : fpr.entries[largest].polygon.vertices) {
      p_lo = std::min(p_lo, v.p_mw);
      p_hi = std::max(p_hi, v.p_mw);
    }
    m.f_min_pu = std::max(-1.0, p_lo / big);
    m.f_max_pu = std::min(1.0, p_hi / big);
  }

  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= static_cast<double>(c.size());
  double sst = 0.0;
  for (double v : c) sst += (v - mean) * (v - mean);

  if (m.m_max_mw - m.m_min_mw <= 1e-12 * std::max(1.0, m.m_max_mw)) {
    m.degenerate = true;
    m.warning = fpr.entries.size() < 2 ? "single FPR entry; slope set to 0"
                                       : "all FPR capacities equal; slope set to 0";
    m.capex_per_mw = 0.0;
    m.base_cost = std::max(0.0, mean);
    double sse = 0.0;
    for (double v : c) sse += (v - m.base_cost) * (v - m.base_cost);
    m.r_squared = sst > 0 ? 1.0 - sse / sst : 1.0;
    return m;
  }
  const LineFit fit = fit_nonnegative_line(r, c);
  m.capex_per_mw = fit.a;
  m.base_cost = fit.b;
  m.r_squared = sst > 0 ? 1.0 - fit.sse / sst : 1.0;
  return m;
}

const char* to_string(ChildSelection selection) {
  return selection == ChildSelection::by_scale ? "by_scale" : "largest";
}

ChildSelection parse_child_selection(const std::string& text) {
  if (text == "by_scale") return ChildSelection::by_scale;
  if (text == "largest") return ChildSelection::largest;
  fail(ErrorKind::invalid_argument, "unknown child selection '" + text + "'");
}

const FprEntry& select_entry(const Fpr& fpr, ChildSelection selection, double scale_factor) {
  if (fpr.entries.empty()) fail(ErrorKind::invalid_argument, "child FPR '" + fpr.grid_id + "' is empty");
  if (selection == ChildSelection::largest) return fpr.entries.back();
  const FprEntry* best = nullptr;
  for (const auto& e : fpr.entries) {
    if (std::abs(e.scale_factor - scale_factor) <= 1e-9) return e;
    if (e.scale_factor <= scale_factor && (!best || e.scale_factor > best->scale_factor)) best = &e;
  }
  return best ? *best : fpr.entries.front();
}

grid::Network embed_child(const grid::Network& parent, const Fpr& child,
                          const std::string& attach_bus, ChildSelection selection,
                          double scale_factor) {
  if (!parent.bus_index(attach_bus)) {
    fail(ErrorKind::invalid_argument,
         "embed_child: unknown bus '" + attach_bus + "' in grid '" + parent.id + "'");
  }
  const FprEntry& entry = select_entry(child, selection, scale_factor);
  grid::Unit u;
  u.id = "fpr_" + child.grid_id;
  for (int k = 2; parent.find_unit(u.id); ++k) u.id = "fpr_" + child.grid_id + "_" + std::to_string(k);
  u.bus = attach_bus;
  u.kind = grid::UnitKind::equivalent_fpr;
  u.technology = "fpr";
  u.child_fpr_ref = child.grid_id;
  u.child_cost = entry.cost;
  // Import at the child PCC is consumption seen from the parent.
  for (const auto& v : entry.polygon.vertices) u.pq_polygon.push_back({-v.p_mw, -v.q_mvar});
  const auto box = geometry::bounding_box(u.pq_polygon);
  u.p_min_mw = box.p_min;
  u.p_max_mw = box.p_max;
  u.q_min_mvar = box.q_min;
  u.q_max_mvar = box.q_max;

  grid::Network out = parent;
  out.units.push_back(std::move(u));
  return out;
}

Json fpr_to_json(const Fpr& fpr) {
  Json entries = Json::array();
  for (const auto& e : fpr.entries) {
    entries.push_back(Json{{"cost", e.cost},
                           {"polygon", region::for_to_json(e.polygon)},
                           {"stage_ref", e.stage_ref},
                           {"scale_factor", e.scale_factor}});
  }
  return Json{{"grid_id", fpr.grid_id},
              {"grid_class",
               Json{{"voltage_level", grid::to_string(fpr.grid_class.voltage_level)},
                    {"urbanization", grid::to_string(fpr.grid_class.urbanization)}}},
              {"entries", std::move(entries)}};
}

Fpr fpr_from_json(const Json& doc, const std::string& source) {
  io::require_keys_subset(doc, {"grid_id", "grid_class", "entries"}, source);
  Fpr out;
  out.grid_id = io::string_field(doc, "grid_id", source);
  const Json& gc = io::require_field(doc, "grid_class", source);
  io::require_keys_subset(gc, {"voltage_level", "urbanization"}, source + ".grid_class");
  out.grid_class = {grid::parse_voltage_level(io::string_field(gc, "voltage_level", source)),
                    grid::parse_urbanization(io::string_field(gc, "urbanization", source))};
  const Json& es = io::require_field(doc, "entries", source);
  if (!es.is_array() || es.empty()) fail(ErrorKind::schema, source + ".entries: expected a nonempty array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string w = source + ".entries[" + std::to_string(i) + "]";
    io::require_keys_subset(es[i], {"cost", "polygon", "stage_ref", "scale_factor"}, w);
    FprEntry e;
    e.cost = io::number_field(es[i], "cost", w);
    e.polygon = region::for_from_json(io::require_field(es[i], "polygon", w), w + ".polygon");
    e.stage_ref = io::require_field(es[i], "stage_ref", w).get<int>();
    e.scale_factor = io::number_or(es[i], "scale_factor", 1.0, w);
    out.entries.push_back(std::move(e));
  }
  return out;
}

Json linear_model_to_json(const LinearFprModel& m) {
  return Json{{"grid_id", m.grid_id},
              {"metric", to_string(m.metric)},
              {"capex_per_mw", m.capex_per_mw},
              {"base_cost", m.base_cost},
              {"m_min_mw", m.m_min_mw},
              {"m_max_mw", m.m_max_mw},
              {"f_min_pu", m.f_min_pu},
              {"f_max_pu", m.f_max_pu},
              {"opex_per_mwh", m.opex_per_mwh},
              {"r_squared", m.r_squared},
              {"degenerate", m.degenerate},
              {"warning", m.warning}};
}

LinearFprModel linear_model_from_json(const Json& doc, const std::string& source) {
  io::require_keys_subset(doc,
                          {"grid_id", "metric", "capex_per_mw", "base_cost", "m_min_mw", "m_max_mw",
                           "f_min_pu", "f_max_pu", "opex_per_mwh", "r_squared", "degenerate",
                           "warning"},
                          source);
  LinearFprModel m;
  if (doc.contains("grid_id")) m.grid_id = io::string_field(doc, "grid_id", source);
  if (doc.contains("metric")) m.metric = parse_capacity_metric(io::string_field(doc, "metric", source));
  m.capex_per_mw = io::number_field(doc, "capex_per_mw", source);
  m.base_cost = io::number_or(doc, "base_cost", 0.0, source);
  m.m_min_mw = io::number_field(doc, "m_min_mw", source);
  m.m_max_mw = io::number_field(doc, "m_max_mw", source);
  m.f_min_pu = io::number_field(doc, "f_min_pu", source);
  m.f_max_pu = io::number_field(doc, "f_max_pu", source);
  m.opex_per_mwh = io::number_or(doc, "opex_per_mwh", 0.0, source);
  m.r_squared = io::number_or(doc, "r_squared", 1.0, source);
  m.degenerate = io::bool_or(doc, "degenerate", false, source);
  if (doc.contains("warning")) m.warning = io::string_field(doc, "warning", source);
  if (m.capex_per_mw < 0 || m.m_min_mw > m.m_max_mw || m.f_min_pu > 0 || m.f_max_pu < 0 ||
      m.f_min_pu < -1 || m.f_max_pu > 1) {
    fail(ErrorKind::schema, source + ": linear model violates its bounds");
  }
  return m;
}

std::string fpr_curve_csv(const Fpr& fpr, CapacityMetric metric) {
  std::ostringstream out;
  out << "cost,area,R\n";
  for (const auto& e : fpr.entries) {
    out << io::format_number(e.cost) << ',' << io::format_number(geometry::area(e.polygon.vertices))
        << ',' << io::format_number(capacity(e.polygon, metric)) << '\n';
  }
  return out.str();
}

}  // namespace fpr::builder
