#include "fpr/cep.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fpr/error.hpp"

namespace fpr::cep {

namespace {

std::string snap(std::size_t t) { return "_t" + std::to_string(t); }

void check_profile(const std::vector<double>& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    fail(ErrorKind::invalid_argument, what + ": profile has " + std::to_string(v.size()) +
                                          " entries, expected " + std::to_string(n));
  }
}

}  // namespace

void validate(const CepModel& m) {
  const std::size_t n = m.snapshot_count();
  if (n == 0) fail(ErrorKind::invalid_argument, "CEP model '" + m.id + "' has no snapshots");
  for (double w : m.weights) {
    if (!(w > 0)) fail(ErrorKind::invalid_argument, "snapshot weights must be positive");
  }
  if (!(m.flow_cost_per_mwh >= 0)) {
    fail(ErrorKind::invalid_argument, "flow_cost_per_mwh must be >= 0");
  }
  std::set<std::string> nodes(m.nodes.begin(), m.nodes.end());
  if (nodes.size() != m.nodes.size()) fail(ErrorKind::invalid_argument, "duplicate node id");
  for (const auto& d : m.dso_links) {
    if (!nodes.count(d.node)) fail(ErrorKind::invalid_argument, d.id + ": unknown TSO node '" + d.node + "'");
    if (!nodes.insert(d.dso_node).second) {
      fail(ErrorKind::invalid_argument, d.id + ": DSO node '" + d.dso_node + "' is not unique");
    }
    check_profile(d.demand, n, d.id + ".demand");
    for (double v : d.demand) {
      if (v < 0) fail(ErrorKind::invalid_argument, d.id + ": demand must be nonnegative");
    }
    if (!(d.loss >= 0 && d.loss < 1)) fail(ErrorKind::invalid_argument, d.id + ": loss must lie in [0, 1)");
    if (!(d.annuity_factor >= 0) || !(d.grid_count > 0)) {
      fail(ErrorKind::invalid_argument, d.id + ": annuity_factor >= 0 and grid_count > 0 required");
    }
    const auto& lm = d.model;
    if (lm.capex_per_mw < 0 || lm.m_min_mw > lm.m_max_mw || lm.f_min_pu > 0 || lm.f_max_pu < 0 ||
        lm.f_min_pu < -1 || lm.f_max_pu > 1) {
      fail(ErrorKind::invalid_argument, d.id + ": linear model violates its bounds");
    }
  }
  for (const auto& [node, profile] : m.demand) {
    if (!std::count(m.nodes.begin(), m.nodes.end(), node)) {
      fail(ErrorKind::invalid_argument, "demand for unknown TSO node '" + node + "'");
    }
    check_profile(profile, n, "demand." + node);
    for (double v : profile) {
      if (v < 0) fail(ErrorKind::invalid_argument, "demand." + node + ": demand must be nonnegative");
    }
  }
  std::set<std::string> ids;
  auto unique_id = [&](const std::string& id) {
    if (!ids.insert(id).second) fail(ErrorKind::invalid_argument, "duplicate asset id '" + id + "'");
  };
  for (const auto& g : m.generators) {
    unique_id(g.id);
    if (!nodes.count(g.node)) fail(ErrorKind::invalid_argument, g.id + ": unknown node '" + g.node + "'");
    check_profile(g.availability, n, g.id + ".availability");
    for (double a : g.availability) {
      if (!(a >= 0 && a <= 1)) fail(ErrorKind::invalid_argument, g.id + ": availability outside [0, 1]");
    }
    if (g.p_nom_min < 0 || g.p_nom_min > g.p_nom_max) {
      fail(ErrorKind::invalid_argument, g.id + ": bad p_nom bounds");
    }
  }
  for (const auto& s : m.storage) {
    unique_id(s.id);
    if (!nodes.count(s.node)) fail(ErrorKind::invalid_argument, s.id + ": unknown node '" + s.node + "'");
    if (!(s.efficiency > 0 && s.efficiency <= 1)) {
      fail(ErrorKind::invalid_argument, s.id + ": efficiency must lie in (0, 1]");
    }
  }
  for (const auto& l : m.tx_links) {
    unique_id(l.id);
    if (!nodes.count(l.from) || !nodes.count(l.to)) {
      fail(ErrorKind::invalid_argument, l.id + ": unknown endpoint");
    }
    if (!(l.loss >= 0 && l.loss < 1)) fail(ErrorKind::invalid_argument, l.id + ": loss must lie in [0, 1)");
  }
  for (const auto& d : m.dso_links) unique_id(d.id);
}

BuiltLp build(const CepModel& m) {
  validate(m);
  const std::size_t T = m.snapshot_count();
  BuiltLp out;
  lp::Problem& p = out.problem;
  Layout& L = out.layout;

  std::vector<std::string> all_nodes = m.nodes;
  for (const auto& d : m.dso_links) all_nodes.push_back(d.dso_node);
  auto node_index = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(all_nodes.begin(), all_nodes.end(), id) - all_nodes.begin());
  };
  // balance[node][t] collects terms; rhs is demand.
  std::vector<std::vector<std::vector<std::pair<int, double>>>> bal(
      all_nodes.size(), std::vector<std::vector<std::pair<int, double>>>(T));

  for (const auto& g : m.generators) {
    const int cap = p.add_variable("gen_" + g.id + "_p_nom", g.capex_per_mw, g.p_nom_min, g.p_nom_max);
    L.gen_p_nom.push_back(cap);
    std::vector<int> cols;
    const auto nd = node_index(g.node);
    for (std::size_t t = 0; t < T; ++t) {
      const int c = p.add_variable("gen_" + g.id + "_p" + snap(t), m.weights[t] * g.marginal_cost);
      cols.push_back(c);
      p.add_row("cap_gen_" + g.id + snap(t), "capacity", {{c, 1.0}, {cap, -g.availability[t]}},
                lp::Sense::le, 0.0);
      bal[nd][t].push_back({c, 1.0});
    }
    L.gen_p.push_back(std::move(cols));
  }

  for (const auto& s : m.storage) {
    const int e_nom = p.add_variable("sto_" + s.id + "_e_nom", s.capex_per_mwh, 0.0, s.e_nom_max);
    const int p_nom = p.add_variable("sto_" + s.id + "_p_nom", s.capex_per_mw, 0.0, s.p_nom_max);
    L.sto_e_nom.push_back(e_nom);
    L.sto_p_nom.push_back(p_nom);
    std::vector<int> ch, dis, soc;
    const auto nd = node_index(s.node);
    for (std::size_t t = 0; t < T; ++t) {
      ch.push_back(p.add_variable("sto_" + s.id + "_charge" + snap(t), 0.0));
      dis.push_back(p.add_variable("sto_" + s.id + "_discharge" + snap(t), 0.0));
      soc.push_back(p.add_variable("sto_" + s.id + "_soc" + snap(t), 0.0));
    }
    for (std::size_t t = 0; t < T; ++t) {
      p.add_row("cap_sto_" + s.id + "_charge" + snap(t), "capacity", {{ch[t], 1.0}, {p_nom, -1.0}},
                lp::Sense::le, 0.0);
      p.add_row("cap_sto_" + s.id + "_discharge" + snap(t), "capacity",
                {{dis[t], 1.0}, {p_nom, -1.0}}, lp::Sense::le, 0.0);
      p.add_row("cap_sto_" + s.id + "_soc" + snap(t), "capacity", {{soc[t], 1.0}, {e_nom, -1.0}},
                lp::Sense::le, 0.0);
      // Cyclic state of charge.
      const std::size_t prev = t == 0 ? T - 1 : t - 1;
      std::vector<std::pair<int, double>> row{{soc[t], 1.0},
                                              {ch[t], -m.weights[t] * s.efficiency},
                                              {dis[t], m.weights[t]}};
      if (prev != t) row.push_back({soc[prev], -1.0});
      p.add_row("soc_" + s.id + snap(t), "storage", std::move(row), lp::Sense::eq, 0.0);
      bal[nd][t].push_back({dis[t], 1.0});
      bal[nd][t].push_back({ch[t], -1.0});
    }
    L.sto_charge.push_back(std::move(ch));
    L.sto_discharge.push_back(std::move(dis));
    L.sto_soc.push_back(std::move(soc));
  }

  for (const auto& l : m.tx_links) {
    const int cap = p.add_variable("tx_" + l.id + "_p_nom", l.capex_per_mw, 0.0, l.p_nom_max);
    L.tx_p_nom.push_back(cap);
    std::vector<int> fw, bw;
    const auto a = node_index(l.from);
    const auto b = node_index(l.to);
    for (std::size_t t = 0; t < T; ++t) {
      const double fc = m.weights[t] * m.flow_cost_per_mwh;
      const int f = p.add_variable("tx_" + l.id + "_fwd" + snap(t), fc);
      const int r = p.add_variable("tx_" + l.id + "_bwd" + snap(t), fc);
      fw.push_back(f);
      bw.push_back(r);
      p.add_row("cap_tx_" + l.id + "_fwd" + snap(t), "capacity", {{f, 1.0}, {cap, -1.0}}, lp::Sense::le, 0.0);
      p.add_row("cap_tx_" + l.id + "_bwd" + snap(t), "capacity", {{r, 1.0}, {cap, -1.0}}, lp::Sense::le, 0.0);
      bal[a][t].push_back({f, -1.0});
      bal[a][t].push_back({r, 1.0 - l.loss});
      bal[b][t].push_back({f, 1.0 - l.loss});
      bal[b][t].push_back({r, -1.0});
    }
    L.tx_fwd.push_back(std::move(fw));
    L.tx_bwd.push_back(std::move(bw));
  }

  for (const auto& d : m.dso_links) {
    const auto& lm = d.model;
    double m_lo = 0.0, m_hi = lp::kInf, capex = 0.0, opex = 0.0, f_lo = -1.0, f_hi = 1.0;
    if (!d.uncapped) {
      m_lo = lm.m_min_mw * d.grid_count;
      m_hi = lm.m_max_mw * d.grid_count;
      capex = lm.capex_per_mw * d.annuity_factor;
      opex = lm.opex_per_mwh;
      f_lo = lm.f_min_pu;
      f_hi = lm.f_max_pu;
      p.objective_constant += lm.base_cost * d.annuity_factor * d.grid_count;
    }
    const int cap = p.add_variable("dso_" + d.id + "_m", capex, m_lo, m_hi);
    L.dso_m.push_back(cap);
    std::vector<int> imp, exp;
    const auto tso = node_index(d.node);
    const auto dso = node_index(d.dso_node);
    for (std::size_t t = 0; t < T; ++t) {
      const double fc = m.weights[t] * m.flow_cost_per_mwh;
      const int fi = p.add_variable("dso_" + d.id + "_import" + snap(t), m.weights[t] * opex + fc);
      const int fe = p.add_variable("dso_" + d.id + "_export" + snap(t), fc);
      imp.push_back(fi);
      exp.push_back(fe);
      p.add_row("link_" + d.id + "_max" + snap(t), "link", {{fi, 1.0}, {fe, -1.0}, {cap, -f_hi}},
                lp::Sense::le, 0.0);
      p.add_row("link_" + d.id + "_min" + snap(t), "link", {{fi, -1.0}, {fe, 1.0}, {cap, f_lo}},
                lp::Sense::le, 0.0);
      bal[tso][t].push_back({fi, -1.0});
      bal[tso][t].push_back({fe, 1.0 - d.loss});
      bal[dso][t].push_back({fi, 1.0 - d.loss});
      bal[dso][t].push_back({fe, -1.0});
    }
    L.dso_import.push_back(std::move(imp));
    L.dso_export.push_back(std::move(exp));
  }

  for (std::size_t k = 0; k < all_nodes.size(); ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      double demand = 0.0;
      if (k < m.nodes.size()) {
        auto it = m.demand.find(all_nodes[k]);
        if (it != m.demand.end()) demand = it->second[t];
      } else {
        demand = m.dso_links[k - m.nodes.size()].demand[t];
      }
      p.add_row("bal_" + all_nodes[k] + snap(t), "balance", std::move(bal[k][t]), lp::Sense::eq, demand);
    }
  }
  return out;
}

CepSolution solve(const CepModel& model, const BuiltLp& built) {
  const auto r = lp::solve(built.problem);
  CepSolution s;
  s.status = r.status;
  s.diagnostics = r.diagnostics;
  if (r.status != lp::Status::optimal) return s;
  s.objective = r.objective;
  s.x = r.x;
  const Layout& L = built.layout;
  auto val = [&](int c) { return r.x[static_cast<std::size_t>(c)]; };
  for (std::size_t i = 0; i < model.generators.size(); ++i) {
    s.capacities[model.generators[i].id] = val(L.gen_p_nom[i]);
  }
  for (std::size_t i = 0; i < model.storage.size(); ++i) {
    s.capacities[model.storage[i].id + ":energy"] = val(L.sto_e_nom[i]);
    s.capacities[model.storage[i].id] = val(L.sto_p_nom[i]);
  }
  for (std::size_t i = 0; i < model.tx_links.size(); ++i) {
    s.capacities[model.tx_links[i].id] = val(L.tx_p_nom[i]);
  }
  for (std::size_t i = 0; i < model.dso_links.size(); ++i) {
    s.capacities[model.dso_links[i].id] = val(L.dso_m[i]);
  }
  return s;
}

CepSolution solve(const CepModel& model) { return solve(model, build(model)); }

CepModel derive_scenario_a(const CepModel& model) {
  CepModel a = model;
  for (auto& d : a.dso_links) d.uncapped = true;
  return a;
}

std::vector<EnergyRow> energy_balance(const CepModel& m, const BuiltLp& built, const CepSolution& s,
                                      const std::string& scenario) {
  if (s.status != lp::Status::optimal) {
    fail(ErrorKind::infeasible, "energy balance of non-optimal scenario " + scenario);
  }
  const Layout& L = built.layout;
  const std::size_t T = m.snapshot_count();
  auto val = [&](int c) { return s.x[static_cast<std::size_t>(c)]; };
  std::map<std::string, EnergyRow> rows;
  auto row = [&](const std::string& tech) -> EnergyRow& {
    auto& r = rows[tech];
    r.scenario = scenario;
    r.technology = tech;
    return r;
  };
  for (std::size_t i = 0; i < m.generators.size(); ++i) {
    auto& r = row(m.generators[i].technology);
    for (std::size_t t = 0; t < T; ++t) r.provided_mwh += m.weights[t] * val(L.gen_p[i][t]);
  }
  for (std::size_t i = 0; i < m.storage.size(); ++i) {
    auto& r = row(m.storage[i].technology);
    for (std::size_t t = 0; t < T; ++t) {
      r.provided_mwh += m.weights[t] * val(L.sto_discharge[i][t]);
      r.consumed_mwh += m.weights[t] * val(L.sto_charge[i][t]);
    }
  }
  {
    auto& r = row("demand");
    for (const auto& [node, profile] : m.demand) {
      for (std::size_t t = 0; t < T; ++t) r.consumed_mwh += m.weights[t] * profile[t];
    }
    for (const auto& d : m.dso_links) {
      for (std::size_t t = 0; t < T; ++t) r.consumed_mwh += m.weights[t] * d.demand[t];
    }
  }
  if (!m.tx_links.empty()) {
    auto& r = row("transmission_losses");
    for (std::size_t i = 0; i < m.tx_links.size(); ++i) {
      for (std::size_t t = 0; t < T; ++t) {
        r.consumed_mwh += m.weights[t] * m.tx_links[i].loss * (val(L.tx_fwd[i][t]) + val(L.tx_bwd[i][t]));
      }
    }
  }
  if (!m.dso_links.empty()) {
    auto& r = row("tso_dso_link_losses");
    for (std::size_t i = 0; i < m.dso_links.size(); ++i) {
      for (std::size_t t = 0; t < T; ++t) {
        r.consumed_mwh +=
            m.weights[t] * m.dso_links[i].loss * (val(L.dso_import[i][t]) + val(L.dso_export[i][t]));
      }
    }
  }
  std::vector<EnergyRow> out;
  for (auto& [tech, r] : rows) out.push_back(r);
  return out;
}

ScenarioSummary summarize(const CepModel& m, const BuiltLp& built, const CepSolution& s,
                          const std::string& scenario) {
  if (s.status != lp::Status::optimal) fail(ErrorKind::infeasible, "summary of non-optimal scenario " + scenario);
  const Layout& L = built.layout;
  const std::size_t T = m.snapshot_count();
  auto val = [&](int c) { return s.x[static_cast<std::size_t>(c)]; };
  ScenarioSummary out;
  out.scenario = scenario;
  out.objective = s.objective;
  std::set<std::string> dso_nodes;
  for (const auto& d : m.dso_links) dso_nodes.insert(d.dso_node);
  for (std::size_t i = 0; i < m.dso_links.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      const double through = val(L.dso_import[i][t]) + val(L.dso_export[i][t]);
      out.link_energy_mwh += m.weights[t] * through;
      out.link_losses_mwh += m.weights[t] * m.dso_links[i].loss * through;
    }
  }
  for (std::size_t i = 0; i < m.generators.size(); ++i) {
    double e = 0.0;
    for (std::size_t t = 0; t < T; ++t) e += m.weights[t] * val(L.gen_p[i][t]);
    out.total_generation_mwh += e;
    if (dso_nodes.count(m.generators[i].node)) out.dso_local_generation_mwh += e;
  }
  out.dso_local_share =
      out.total_generation_mwh > 0 ? out.dso_local_generation_mwh / out.total_generation_mwh : 0.0;
  return out;
}

StudyReport run_study(const CepModel& scenario_a, const CepModel& scenario_b) {
  StudyReport rep;
  rep.lp_a = build(scenario_a);
  rep.lp_b = build(scenario_b);
  rep.solution_a = solve(scenario_a, rep.lp_a);
  rep.solution_b = solve(scenario_b, rep.lp_b);
  for (const auto* s : {&rep.solution_a, &rep.solution_b}) {
    if (s->status != lp::Status::optimal) {
      fail(ErrorKind::infeasible, std::string("scenario ") + (s == &rep.solution_a ? "A" : "B") +
                                      " is " + lp::to_string(s->status) +
                                      (s->diagnostics.empty() ? "" : ": " + s->diagnostics));
    }
  }
  rep.rows = energy_balance(scenario_a, rep.lp_a, rep.solution_a, "A");
  auto rows_b = energy_balance(scenario_b, rep.lp_b, rep.solution_b, "B");
  rep.rows.insert(rep.rows.end(), rows_b.begin(), rows_b.end());
  rep.a = summarize(scenario_a, rep.lp_a, rep.solution_a, "A");
  rep.b = summarize(scenario_b, rep.lp_b, rep.solution_b, "B");
  return rep;
}

std::string report_csv(const std::vector<EnergyRow>& rows) {
  std::ostringstream out;
  out << "scenario,technology,provided_mwh,consumed_mwh\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.technology << ',' << io::format_number(r.provided_mwh) << ','
        << io::format_number(r.consumed_mwh) << '\n';
  }
  return out.str();
}

std::string summary_csv(const StudyReport& rep) {
  std::ostringstream out;
  out << "scenario,objective,link_energy_mwh,link_losses_mwh,dso_local_generation_mwh,"
         "total_generation_mwh,dso_local_share\n";
  for (const auto* s : {&rep.a, &rep.b}) {
    out << s->scenario << ',' << io::format_number(s->objective) << ','
        << io::format_number(s->link_energy_mwh) << ',' << io::format_number(s->link_losses_mwh)
        << ',' << io::format_number(s->dso_local_generation_mwh) << ','
        << io::format_number(s->total_generation_mwh) << ',' << io::format_number(s->dso_local_share)
        << '\n';
  }
  return out.str();
}

namespace {

std::vector<double> profile_field(const Json& obj, const char* key, std::size_t n,
                                  const std::string& where) {
  const Json& v = io::require_field(obj, key, where);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  if (!v.is_array()) fail(ErrorKind::schema, where + "." + key + ": expected a number or an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(ErrorKind::schema, where + "." + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

double bound_or_inf(const Json& obj, const char* key, const std::string& where) {
  return io::number_or(obj, key, lp::kInf, where);
}

const Json& array_or_empty(const Json& doc, const char* key, const std::string& where) {
  static const Json empty = Json::array();
  if (!doc.contains(key)) return empty;
  if (!doc[key].is_array()) fail(ErrorKind::schema, where + "." + key + ": expected an array");
  return doc[key];
}

}  // namespace

CepModel model_from_json(const Json& doc, const std::string& source, const ModelResolver& resolve) {
  io::require_keys_subset(doc, {"id", "nodes", "weights", "demand", "generators", "storage",
                                "tx_links", "dso_links", "flow_cost_per_mwh"},
                          source);
  CepModel m;
  m.flow_cost_per_mwh = io::number_or(doc, "flow_cost_per_mwh", m.flow_cost_per_mwh, source);
  m.id = doc.contains("id") ? io::string_field(doc, "id", source) : "cep";
  const Json& nodes = io::require_field(doc, "nodes", source);
  if (!nodes.is_array()) fail(ErrorKind::schema, source + ".nodes: expected an array");
  for (const auto& n : nodes) m.nodes.push_back(n.get<std::string>());
  const Json& w = io::require_field(doc, "weights", source);
  if (!w.is_array()) fail(ErrorKind::schema, source + ".weights: expected an array");
  m.weights = w.get<std::vector<double>>();
  const std::size_t T = m.weights.size();
  if (doc.contains("demand")) {
    for (const auto& item : doc["demand"].items()) {
      m.demand[item.key()] = profile_field(doc["demand"], item.key().c_str(), T, source + ".demand");
    }
  }
  const Json& gens = array_or_empty(doc, "generators", source);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string wg = source + ".generators[" + std::to_string(i) + "]";
    io::require_keys_subset(gens[i], {"id", "node", "technology", "capex_per_mw", "marginal_cost",
                                      "availability", "p_nom_min", "p_nom_max"},
                            wg);
    Generator g;
    g.id = io::string_field(gens[i], "id", wg);
    g.node = io::string_field(gens[i], "node", wg);
    g.technology = gens[i].contains("technology") ? io::string_field(gens[i], "technology", wg) : g.id;
    g.capex_per_mw = io::number_or(gens[i], "capex_per_mw", 0.0, wg);
    g.marginal_cost = io::number_or(gens[i], "marginal_cost", 0.0, wg);
    g.availability = gens[i].contains("availability") ? profile_field(gens[i], "availability", T, wg)
                                                      : std::vector<double>(T, 1.0);
    g.p_nom_min = io::number_or(gens[i], "p_nom_min", 0.0, wg);
    g.p_nom_max = bound_or_inf(gens[i], "p_nom_max", wg);
    m.generators.push_back(std::move(g));
  }
  const Json& sto = array_or_empty(doc, "storage", source);
  for (std::size_t i = 0; i < sto.size(); ++i) {
    const std::string ws = source + ".storage[" + std::to_string(i) + "]";
    io::require_keys_subset(sto[i], {"id", "node", "technology", "capex_per_mwh", "capex_per_mw",
                                     "efficiency", "e_nom_max", "p_nom_max"},
                            ws);
    Storage s;
    s.id = io::string_field(sto[i], "id", ws);
    s.node = io::string_field(sto[i], "node", ws);
    s.technology = sto[i].contains("technology") ? io::string_field(sto[i], "technology", ws) : s.id;
    s.capex_per_mwh = io::number_or(sto[i], "capex_per_mwh", 0.0, ws);
    s.capex_per_mw = io::number_or(sto[i], "capex_per_mw", 0.0, ws);
    s.efficiency = io::number_or(sto[i], "efficiency", s.efficiency, ws);
    s.e_nom_max = bound_or_inf(sto[i], "e_nom_max", ws);
    s.p_nom_max = bound_or_inf(sto[i], "p_nom_max", ws);
    m.storage.push_back(std::move(s));
  }
  const Json& tx = array_or_empty(doc, "tx_links", source);
  for (std::size_t i = 0; i < tx.size(); ++i) {
    const std::string wt = source + ".tx_links[" + std::to_string(i) + "]";
    io::require_keys_subset(tx[i], {"id", "from", "to", "capex_per_mw", "loss", "p_nom_max"}, wt);
    m.tx_links.push_back({io::string_field(tx[i], "id", wt), io::string_field(tx[i], "from", wt),
                          io::string_field(tx[i], "to", wt),
                          io::number_or(tx[i], "capex_per_mw", 0.0, wt),
                          io::number_or(tx[i], "loss", 0.0, wt), bound_or_inf(tx[i], "p_nom_max", wt)});
  }
  const Json& dso = array_or_empty(doc, "dso_links", source);
  for (std::size_t i = 0; i < dso.size(); ++i) {
    const std::string wd = source + ".dso_links[" + std::to_string(i) + "]";
    io::require_keys_subset(dso[i], {"id", "node", "dso_node", "linear_model", "demand", "loss",
                                     "annuity_factor", "grid_count", "uncapped"},
                            wd);
    DsoLink d;
    d.id = io::string_field(dso[i], "id", wd);
    d.node = io::string_field(dso[i], "node", wd);
    d.dso_node = dso[i].contains("dso_node") ? io::string_field(dso[i], "dso_node", wd) : d.id + "_dso";
    const Json& lm = io::require_field(dso[i], "linear_model", wd);
    if (lm.is_string()) {
      const std::string ref = lm.get<std::string>();
      const std::filesystem::path path = resolve ? resolve(ref) : std::filesystem::path(ref);
      d.model = builder::linear_model_from_json(io::read_json_file(path), path.string());
    } else {
      d.model = builder::linear_model_from_json(lm, wd + ".linear_model");
    }
    d.demand = dso[i].contains("demand") ? profile_field(dso[i], "demand", T, wd)
                                         : std::vector<double>(T, 0.0);
    d.loss = io::number_or(dso[i], "loss", d.loss, wd);
    d.annuity_factor = io::number_or(dso[i], "annuity_factor", d.annuity_factor, wd);
    d.grid_count = io::number_or(dso[i], "grid_count", d.grid_count, wd);
    d.uncapped = io::bool_or(dso[i], "uncapped", false, wd);
    m.dso_links.push_back(std::move(d));
  }
  validate(m);
  return m;
}

CepModel load_model(const std::filesystem::path& path, const ModelResolver& resolve) {
  const Json doc = io::read_json_file(path);
  const auto dir = path.parent_path();
  ModelResolver r = [&](const std::string& ref) {
    if (resolve) return resolve(ref);
    const std::filesystem::path p(ref);
    return p.is_absolute() ? p : dir / p;
  };
  return model_from_json(doc, path.string(), r);
}

}  // namespace fpr::cep
