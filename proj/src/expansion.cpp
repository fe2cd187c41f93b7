#include "fpr/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace fpr::expansion {

const char* to_string(UseCase use_case) {
  return use_case == UseCase::high_load ? "high_load" : "high_feed_in";
}

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::replace_line_type: return "replace_line_type";
    case MeasureKind::add_parallel_line: return "add_parallel_line";
    case MeasureKind::split_line_at_two_thirds: return "split_line_at_two_thirds";
    case MeasureKind::replace_transformer: return "replace_transformer";
    case MeasureKind::add_parallel_transformer: return "add_parallel_transformer";
  }
  return "?";
}

MeasureKind parse_measure_kind(const std::string& text) {
  for (auto k : {MeasureKind::replace_line_type, MeasureKind::add_parallel_line,
                 MeasureKind::split_line_at_two_thirds, MeasureKind::replace_transformer,
                 MeasureKind::add_parallel_transformer}) {
    if (text == to_string(k)) return k;
  }
  fail(ErrorKind::schema, "unknown measure kind '" + text + "'");
}

// --- use cases -------------------------------------------------------------

pf::DispatchPoint use_case_dispatch(const grid::Network& net, UseCase use_case,
                                    const UseCaseConfig& cfg) {
  pf::DispatchPoint d;
  const bool high_load = use_case == UseCase::high_load;
  for (const auto& u : net.units) {
    pf::Setpoint sp;
    switch (u.kind) {
      case grid::UnitKind::load: {
        const double frac = high_load ? 1.0 : cfg.feed_in_load_fraction;
        sp.p_mw = std::clamp(frac * u.p_min_mw, u.p_min_mw, u.p_max_mw);
        sp.q_mvar = std::clamp(frac * u.q_min_mvar, u.q_min_mvar, u.q_max_mvar);
        break;
      }
      case grid::UnitKind::generator:
        sp.p_mw = high_load ? u.p_min_mw : u.p_max_mw;
        sp.q_mvar = std::clamp(0.0, u.q_min_mvar, u.q_max_mvar);
        break;
      case grid::UnitKind::equivalent_fpr:
        if (u.pq_polygon.empty()) {
          sp.p_mw = high_load ? u.p_min_mw : u.p_max_mw;
          sp.q_mvar = std::clamp(0.0, u.q_min_mvar, u.q_max_mvar);
        } else {
          const geometry::Point* best = &u.pq_polygon.front();
          for (const auto& v : u.pq_polygon) {
            if (high_load ? v.p_mw < best->p_mw : v.p_mw > best->p_mw) best = &v;
          }
          sp.p_mw = best->p_mw;
          sp.q_mvar = best->q_mvar;
        }
        break;
    }
    d.setpoints[u.id] = sp;
  }
  return d;
}

namespace {

pf::ViolationReport merge(const pf::ViolationReport& a, const pf::ViolationReport& b) {
  std::map<std::string, double> thermal;
  for (const auto* r : {&a, &b}) {
    for (const auto& t : r->thermal) {
      auto [it, inserted] = thermal.emplace(t.element_id, t.loading_percent);
      if (!inserted) it->second = std::max(it->second, t.loading_percent);
    }
  }
  std::map<std::string, pf::VoltageViolation> voltage;
  auto deviation = [](const pf::VoltageViolation& v) {
    return v.bound == pf::VoltageBound::lower ? 1.0 - v.v_pu : v.v_pu - 1.0;
  };
  for (const auto* r : {&a, &b}) {
    for (const auto& v : r->voltage) {
      auto [it, inserted] = voltage.emplace(v.bus_id, v);
      if (!inserted && deviation(v) > deviation(it->second)) it->second = v;
    }
  }
  pf::ViolationReport out;
  for (const auto& [id, l] : thermal) out.thermal.push_back({id, l});
  for (const auto& [id, v] : voltage) out.voltage.push_back(v);
  std::sort(out.thermal.begin(), out.thermal.end(), [](const auto& x, const auto& y) {
    if (x.loading_percent != y.loading_percent) return x.loading_percent > y.loading_percent;
    return x.element_id < y.element_id;
  });
  std::sort(out.voltage.begin(), out.voltage.end(), [](const auto& x, const auto& y) {
    if (x.v_pu != y.v_pu) return x.v_pu < y.v_pu;
    return x.bus_id < y.bus_id;
  });
  return out;
}

}  // namespace

UseCaseResult evaluate_use_cases(const grid::Network& net, const UseCaseConfig& cfg) {
  UseCaseResult r;
  const pf::PowerFlowModel model(net);
  r.high_load = model.solve(use_case_dispatch(net, UseCase::high_load, cfg));
  r.high_feed_in = model.solve(use_case_dispatch(net, UseCase::high_feed_in, cfg));
  r.converged = r.high_load.converged && r.high_feed_in.converged;
  if (r.converged) {
    r.violations = merge(pf::check_violations(net, r.high_load),
                         pf::check_violations(net, r.high_feed_in));
  }
  return r;
}

// --- cost --------------------------------------------------------------------

double stage_cost(std::span<const Measure> measures, const grid::EquipmentCatalog& catalog,
                  grid::Urbanization urbanization) {
  double total = 0.0;
  for (const auto& m : measures) {
    if (!m.new_type) continue;
    switch (m.kind) {
      case MeasureKind::replace_line_type:
      case MeasureKind::add_parallel_line:
      case MeasureKind::split_line_at_two_thirds:
        total += (catalog.install_cost(urbanization) + catalog.line_type(*m.new_type).c_mat_per_km) *
                 m.length_km;
        break;
      case MeasureKind::replace_transformer:
      case MeasureKind::add_parallel_transformer:
        total += catalog.transformer_type(*m.new_type).c_trafo * m.quantity;
        break;
    }
  }
  return total;
}

double embedded_child_cost(const grid::Network& net) {
  double total = 0.0;
  for (const auto& u : net.units) {
    if (u.kind == grid::UnitKind::equivalent_fpr) total += u.child_cost;
  }
  return total;
}

std::size_t substation_bus(const grid::Network& net) {
  const std::size_t pcc = net.pcc_index();
  const std::string& pcc_id = net.buses[pcc].id;
  const grid::Transformer* best = nullptr;
  for (const auto& t : net.transformers) {
    if (t.hv_bus == pcc_id && (!best || t.id < best->id)) best = &t;
  }
  return best ? *net.bus_index(best->lv_bus) : pcc;
}

// --- reinforcement -----------------------------------------------------------

namespace {

struct Reinforcer {
  grid::Network& net;
  const grid::EquipmentCatalog& catalog;
  const ReinforceOptions& options;
  std::vector<Measure>& measures;

  double cost_of(const Measure& m) const {
    return stage_cost(std::span<const Measure>(&m, 1), catalog, net.urbanization);
  }

  void record(Measure m) {
    m.cost_delta = cost_of(m);
    measures.push_back(std::move(m));
  }

  std::string unique_id(const std::string& base) const {
    auto taken = [&](const std::string& id) {
      if (net.bus_index(id)) return true;
      for (const auto& l : net.lines) {
        if (l.id == id) return true;
      }
      for (const auto& t : net.transformers) {
        if (t.id == id) return true;
      }
      return false;
    };
    if (!taken(base)) return base;
    for (int k = 2;; ++k) {
      std::string id = base + std::to_string(k);
      if (!taken(id)) return id;
    }
  }

  static double worst_flow(const UseCaseResult& r, const std::string& id) {
    double s = 0.0;
    for (const auto* sol : {&r.high_load, &r.high_feed_in}) {
      for (const auto& bf : sol->branch_flows) {
        if (bf.element_id == id) s = std::max({s, bf.s_from_mva, bf.s_to_mva});
      }
    }
    return s;
  }

  void fix_line(grid::Line& line, double flow_mva) {
    const grid::Bus& from = net.bus(line.from_bus);
    const double per_ka = std::sqrt(3.0) * from.base_kv;
    const double required = flow_mva * (1.0 + options.planning_margin);
    const double needed_ka = required / (per_ka * line.parallel_count);
    for (const grid::LineType* t : catalog.line_types_by_ampacity(from.voltage_level)) {
      if (t->i_max_ka >= needed_ka && t->i_max_ka > line.i_max_ka) {
        line.type_id = t->id;
        line.r_ohm_per_km = t->r_ohm_per_km;
        line.x_ohm_per_km = t->x_ohm_per_km;
        line.i_max_ka = t->i_max_ka;
        record({MeasureKind::replace_line_type, line.id, t->id,
                line.length_km * line.parallel_count, 0, 0.0});
        return;
      }
    }
    // Largest type insufficient: parallel circuits of the present type.
    const int circuits = static_cast<int>(std::ceil(required / (per_ka * line.i_max_ka) - 1e-12));
    const int add = std::max(1, circuits - line.parallel_count);
    for (int k = 0; k < add; ++k) {
      record({MeasureKind::add_parallel_line, line.id, line.type_id, line.length_km, 0, 0.0});
    }
    line.parallel_count += add;
  }

  void fix_transformer(grid::Transformer& trafo, double flow_mva) {
    const double required = flow_mva * (1.0 + options.planning_margin);
    const grid::VoltageLevel level = net.bus(trafo.lv_bus).voltage_level;
    for (const grid::TransformerType* t : catalog.transformer_types_by_rating(level)) {
      if (t->s_rated_mva * trafo.parallel_count >= required && t->s_rated_mva > trafo.s_rated_mva) {
        trafo.type_id = t->id;
        trafo.s_rated_mva = t->s_rated_mva;
        trafo.vk_percent = t->vk_percent;
        record({MeasureKind::replace_transformer, trafo.id, t->id, 0.0, trafo.parallel_count, 0.0});
        return;
      }
    }
    const int units = static_cast<int>(std::ceil(required / trafo.s_rated_mva - 1e-12));
    const int add = std::max(1, units - trafo.parallel_count);
    record({MeasureKind::add_parallel_transformer, trafo.id, trafo.type_id, 0.0, add, 0.0});
    trafo.parallel_count += add;
  }

  void fix_thermal(const UseCaseResult& r) {
    for (const auto& v : r.violations.thermal) {
      const double flow = worst_flow(r, v.element_id);
      bool done = false;
      for (auto& l : net.lines) {
        if (l.id == v.element_id) {
          fix_line(l, flow);
          done = true;
          break;
        }
      }
      if (done) continue;
      for (auto& t : net.transformers) {
        if (t.id == v.element_id) {
          fix_transformer(t, flow);
          break;
        }
      }
    }
  }

  struct PathStep {
    std::size_t line;
    std::size_t near_bus;
    std::size_t far_bus;
  };

  /// Shortest-impedance line paths from the substation; empty for unreachable buses.
  std::vector<std::vector<PathStep>> line_paths(std::size_t source) const {
    const std::size_t n = net.buses.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::optional<PathStep>> via(n);
    std::vector<bool> done(n, false);
    dist[source] = 0.0;
    for (std::size_t iter = 0; iter < n; ++iter) {
      std::size_t u = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && std::isfinite(dist[i]) && (u == n || dist[i] < dist[u])) u = i;
      }
      if (u == n) break;
      done[u] = true;
      for (std::size_t li = 0; li < net.lines.size(); ++li) {
        const auto& l = net.lines[li];
        const std::size_t a = *net.bus_index(l.from_bus);
        const std::size_t b = *net.bus_index(l.to_bus);
        std::size_t other;
        if (a == u) {
          other = b;
        } else if (b == u) {
          other = a;
        } else {
          continue;
        }
        const double w = std::abs(grid::line_impedance_pu(net, l));
        if (dist[u] + w < dist[other]) {
          dist[other] = dist[u] + w;
          via[other] = PathStep{li, u, other};
        }
      }
    }
    std::vector<std::vector<PathStep>> paths(n);
    for (std::size_t t = 0; t < n; ++t) {
      if (t == source || !via[t]) continue;
      std::vector<PathStep> p;
      for (std::size_t cur = t; cur != source; cur = via[cur]->near_bus) p.push_back(*via[cur]);
      std::reverse(p.begin(), p.end());
      paths[t] = std::move(p);
    }
    return paths;
  }

  /// Separates the path at two thirds of its impedance and feeds the
  /// separation point from the substation with the largest line type.
  void split(std::size_t substation, const std::vector<PathStep>& path) {
    std::vector<double> z(path.size());
    double total = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      z[k] = std::abs(grid::line_impedance_pu(net, net.lines[path[k].line]));
      total += z[k];
    }
    const double target = 2.0 / 3.0 * total;
    double cum = 0.0;
    double length_to_split = 0.0;
    std::size_t k = 0;
    for (; k < path.size(); ++k) {
      if (cum + z[k] >= target || k + 1 == path.size()) break;
      cum += z[k];
      length_to_split += net.lines[path[k].line].length_km;
    }
    const double frac = std::clamp((target - cum) / z[k], 0.0, 1.0);
    grid::Line& seg = net.lines[path[k].line];
    const std::string affected = seg.id;
    std::string split_bus;
    if (frac >= 1.0 - 1e-9) {
      split_bus = net.buses[path[k].far_bus].id;
      length_to_split += seg.length_km;
    } else {
      const grid::Bus& far = net.buses[path[k].far_bus];
      grid::Bus nb = far;
      nb.id = unique_id(seg.id + "_sep");
      nb.is_pcc = false;
      split_bus = nb.id;
      grid::Line tail = seg;
      tail.id = unique_id(seg.id + "_b");
      tail.from_bus = nb.id;
      tail.to_bus = far.id;
      tail.length_km = (1.0 - frac) * seg.length_km;
      seg.from_bus = net.buses[path[k].near_bus].id;
      seg.to_bus = nb.id;
      seg.length_km = frac * seg.length_km;
      length_to_split += seg.length_km;
      net.buses.push_back(nb);
      net.lines.push_back(tail);
    }

    const grid::Bus& sub = net.buses[substation];
    const auto types = catalog.line_types_by_ampacity(sub.voltage_level);
    if (types.empty()) {
      fail(ErrorKind::catalog, "no line type available for voltage separation");
    }
    const grid::LineType* largest = types.back();
    grid::Line feeder;
    feeder.id = unique_id(affected + "_new");
    feeder.from_bus = sub.id;
    feeder.to_bus = split_bus;
    feeder.length_km = length_to_split;
    feeder.type_id = largest->id;
    feeder.r_ohm_per_km = largest->r_ohm_per_km;
    feeder.x_ohm_per_km = largest->x_ohm_per_km;
    feeder.i_max_ka = largest->i_max_ka;
    feeder.parallel_count = 1;
    net.lines.push_back(feeder);
    record({MeasureKind::split_line_at_two_thirds, affected, largest->id, length_to_split, 0, 0.0});
  }

  /// Returns false when no violated bus can be remedied by separation.
  bool fix_voltage(const UseCaseResult& r) {
    const std::size_t sub = substation_bus(net);
    auto deviation = [](const pf::VoltageViolation& v) {
      return v.bound == pf::VoltageBound::lower ? 1.0 - v.v_pu : v.v_pu - 1.0;
    };
    std::vector<pf::VoltageViolation> order = r.violations.voltage;
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      if (deviation(a) != deviation(b)) return deviation(a) > deviation(b);
      return a.bus_id < b.bus_id;
    });
    // Worst bus per feeder, feeder identified by its first line.
    std::vector<std::string> targets;
    std::set<std::string> feeders;
    {
      const auto paths = line_paths(sub);
      for (const auto& v : order) {
        const std::size_t b = *net.bus_index(v.bus_id);
        if (paths[b].empty()) continue;
        const std::string feeder = net.lines[paths[b].front().line].id;
        if (feeders.insert(feeder).second) targets.push_back(v.bus_id);
      }
    }
    for (const auto& bus_id : targets) {
      const auto paths = line_paths(sub);
      split(sub, paths[*net.bus_index(bus_id)]);
    }
    return !targets.empty();
  }
};

}  // namespace

ExpansionStage reinforce(const grid::Network& net, const grid::EquipmentCatalog& catalog,
                         const ReinforceOptions& options) {
  ExpansionStage stage;
  stage.network = net;
  Reinforcer r{stage.network, catalog, options, stage.measures};
  for (int iter = 0;; ++iter) {
    const UseCaseResult res = evaluate_use_cases(stage.network, options.use_cases);
    if (!res.converged) {
      throw ReinforcementError(iter == 0 ? "power flow does not converge for the grid use cases of '" +
                                               net.id + "' (unplannable scenario)"
                                         : "power flow diverged during reinforcement of '" +
                                               net.id + "'",
                               {});
    }
    if (res.violations.empty()) break;
    if (iter >= options.max_iterations) {
      throw ReinforcementError("iteration cap reached with violations remaining in '" + net.id + "'",
                               res.violations);
    }
    if (!res.violations.thermal.empty()) {
      r.fix_thermal(res);
    } else if (!r.fix_voltage(res)) {
      throw ReinforcementError(
          "voltage violations in '" + net.id + "' cannot be remedied by line separation",
          res.violations);
    }
  }
  stage.total_cost = stage_cost(stage.measures, catalog, net.urbanization) +
                     embedded_child_cost(stage.network);
  return stage;
}

// --- JSON --------------------------------------------------------------------

Json measure_to_json(const Measure& m) {
  Json j{{"kind", to_string(m.kind)}, {"target", m.target}};
  j["new_type"] = m.new_type ? Json(*m.new_type) : Json(nullptr);
  j["length_km"] = m.length_km;
  j["quantity"] = m.quantity;
  j["cost_delta"] = m.cost_delta;
  return j;
}

Measure measure_from_json(const Json& j, const std::string& where) {
  io::require_keys_subset(j, {"kind", "target", "new_type", "length_km", "quantity", "cost_delta"},
                          where);
  Measure m;
  m.kind = parse_measure_kind(io::string_field(j, "kind", where));
  m.target = io::string_field(j, "target", where);
  if (j.contains("new_type") && !j["new_type"].is_null()) {
    m.new_type = io::string_field(j, "new_type", where);
  }
  m.length_km = io::number_or(j, "length_km", 0.0, where);
  m.quantity = j.contains("quantity") ? j["quantity"].get<int>() : 0;
  m.cost_delta = io::number_or(j, "cost_delta", 0.0, where);
  return m;
}

Json stage_to_json(const ExpansionStage& stage) {
  Json measures = Json::array();
  for (const auto& m : stage.measures) measures.push_back(measure_to_json(m));
  return Json{{"scenario_id", stage.scenario_id},
              {"scale_factor", stage.scale_factor},
              {"total_cost", stage.total_cost},
              {"measures", std::move(measures)},
              {"network", grid::network_to_json(stage.network)}};
}

ExpansionStage stage_from_json(const Json& doc, const std::string& source) {
  io::require_keys_subset(doc, {"scenario_id", "scale_factor", "total_cost", "measures", "network"},
                          source);
  ExpansionStage s;
  s.scenario_id = io::require_field(doc, "scenario_id", source).get<int>();
  s.scale_factor = io::number_field(doc, "scale_factor", source);
  s.total_cost = io::number_field(doc, "total_cost", source);
  const Json& ms = io::require_field(doc, "measures", source);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    s.measures.push_back(measure_from_json(ms[i], source + ": measures[" + std::to_string(i) + "]"));
  }
  s.network = grid::network_from_json(io::require_field(doc, "network", source), source);
  return s;
}

}  // namespace fpr::expansion
