#include "fpr/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fpr/error.hpp"

namespace fpr::grid {

const char* to_string(VoltageLevel level) {
  switch (level) {
    case VoltageLevel::lv: return "LV";
    case VoltageLevel::mv: return "MV";
    case VoltageLevel::hv: return "HV";
  }
  return "?";
}

const char* to_string(Urbanization urbanization) {
  switch (urbanization) {
    case Urbanization::rural: return "rural";
    case Urbanization::suburban: return "suburban";
    case Urbanization::urban: return "urban";
  }
  return "?";
}

const char* to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::load: return "load";
    case UnitKind::generator: return "generator";
    case UnitKind::equivalent_fpr: return "equivalent_fpr";
  }
  return "?";
}

VoltageLevel parse_voltage_level(const std::string& text) {
  if (text == "LV") return VoltageLevel::lv;
  if (text == "MV") return VoltageLevel::mv;
  if (text == "HV") return VoltageLevel::hv;
  fail(ErrorKind::schema, "unknown voltage level '" + text + "'");
}

Urbanization parse_urbanization(const std::string& text) {
  if (text == "rural") return Urbanization::rural;
  if (text == "suburban") return Urbanization::suburban;
  if (text == "urban") return Urbanization::urban;
  fail(ErrorKind::schema, "unknown urbanization '" + text + "'");
}

UnitKind parse_unit_kind(const std::string& text) {
  if (text == "load") return UnitKind::load;
  if (text == "generator") return UnitKind::generator;
  if (text == "equivalent_fpr") return UnitKind::equivalent_fpr;
  fail(ErrorKind::schema, "unknown unit kind '" + text + "'");
}

std::pair<double, double> default_voltage_band(VoltageLevel level) {
  if (level == VoltageLevel::lv) return {0.90, 1.10};
  return {0.95, 1.05};
}

// --- Network -------------------------------------------------------------

std::optional<std::size_t> Network::bus_index(const std::string& bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == bus_id) return i;
  }
  return std::nullopt;
}

std::size_t Network::pcc_index() const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].is_pcc) return i;
  }
  fail(ErrorKind::topology, "network '" + id + "' has no PCC bus");
}

const Bus& Network::bus(const std::string& bus_id) const {
  auto idx = bus_index(bus_id);
  if (!idx) fail(ErrorKind::topology, "unknown bus '" + bus_id + "'");
  return buses[*idx];
}

Unit* Network::find_unit(const std::string& unit_id) {
  for (auto& u : units) {
    if (u.id == unit_id) return &u;
  }
  return nullptr;
}

const Unit* Network::find_unit(const std::string& unit_id) const {
  for (const auto& u : units) {
    if (u.id == unit_id) return &u;
  }
  return nullptr;
}

VoltageLevel Network::grid_level() const {
  std::set<std::string> hv_sides;
  for (const auto& t : transformers) hv_sides.insert(t.hv_bus);
  for (const auto& b : buses) {
    if (!hv_sides.count(b.id)) return b.voltage_level;
  }
  return buses.empty() ? VoltageLevel::lv : buses.front().voltage_level;
}

// --- catalog -------------------------------------------------------------

const LineType& EquipmentCatalog::line_type(const std::string& id) const {
  auto it = line_types.find(id);
  if (it == line_types.end()) fail(ErrorKind::catalog, "unknown line type '" + id + "'");
  return it->second;
}

const TransformerType& EquipmentCatalog::transformer_type(const std::string& id) const {
  auto it = transformer_types.find(id);
  if (it == transformer_types.end()) {
    fail(ErrorKind::catalog, "unknown transformer type '" + id + "'");
  }
  return it->second;
}

double EquipmentCatalog::install_cost(Urbanization urbanization) const {
  auto it = install_cost_per_km.find(urbanization);
  if (it == install_cost_per_km.end()) {
    fail(ErrorKind::catalog,
         std::string("no installation cost for urbanization '") + to_string(urbanization) + "'");
  }
  return it->second;
}

std::vector<const LineType*> EquipmentCatalog::line_types_by_ampacity(VoltageLevel level) const {
  std::vector<const LineType*> out;
  for (const auto& [id, t] : line_types) {
    if (!t.voltage_level || *t.voltage_level == level) out.push_back(&t);
  }
  std::stable_sort(out.begin(), out.end(), [](const LineType* a, const LineType* b) {
    if (a->i_max_ka != b->i_max_ka) return a->i_max_ka < b->i_max_ka;
    return a->id < b->id;
  });
  return out;
}

std::vector<const TransformerType*> EquipmentCatalog::transformer_types_by_rating(
    VoltageLevel lv_level) const {
  std::vector<const TransformerType*> out;
  for (const auto& [id, t] : transformer_types) {
    if (!t.voltage_level || *t.voltage_level == lv_level) out.push_back(&t);
  }
  std::stable_sort(out.begin(), out.end(), [](const TransformerType* a, const TransformerType* b) {
    if (a->s_rated_mva != b->s_rated_mva) return a->s_rated_mva < b->s_rated_mva;
    return a->id < b->id;
  });
  return out;
}

// --- electrical parameters -----------------------------------------------

std::complex<double> line_impedance_pu(const Network& net, const Line& line) {
  const Bus& from = net.bus(line.from_bus);
  const double zb = impedance_base_ohm(from.base_kv, net.base_mva);
  const std::complex<double> z_ohm(line.r_ohm_per_km * line.length_km,
                                   line.x_ohm_per_km * line.length_km);
  return z_ohm / zb / static_cast<double>(line.parallel_count);
}

std::complex<double> transformer_impedance_pu(const Network& net, const Transformer& trafo) {
  const double x = trafo.vk_percent / 100.0 * net.base_mva / trafo.s_rated_mva;
  return {0.0, x / static_cast<double>(trafo.parallel_count)};
}

double line_rating_mva(const Network& net, const Line& line) {
  const Bus& from = net.bus(line.from_bus);
  return line.i_max_ka * std::sqrt(3.0) * from.base_kv * line.parallel_count;
}

double transformer_rating_mva(const Transformer& trafo) {
  return trafo.s_rated_mva * trafo.parallel_count;
}

// --- validation ----------------------------------------------------------

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what,
                  std::vector<Finding>& out) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) out.push_back({id, std::string("duplicate ") + what + " id"});
  }
}

}  // namespace

std::vector<Finding> validate(const Network& net) {
  std::vector<Finding> out;
  if (!(net.base_mva > 0)) out.push_back({net.id, "base_mva must be positive"});

  std::vector<std::string> ids;
  for (const auto& b : net.buses) ids.push_back(b.id);
  check_unique(ids, "bus", out);
  ids.clear();
  for (const auto& l : net.lines) ids.push_back(l.id);
  for (const auto& t : net.transformers) ids.push_back(t.id);
  check_unique(ids, "branch", out);
  ids.clear();
  for (const auto& u : net.units) ids.push_back(u.id);
  check_unique(ids, "unit", out);

  int pcc_count = 0;
  for (const auto& b : net.buses) {
    if (b.is_pcc) ++pcc_count;
    if (!(b.base_kv > 0)) out.push_back({b.id, "base_kv must be positive"});
    if (!(b.v_min_pu > 0 && b.v_min_pu < b.v_max_pu)) {
      out.push_back({b.id, "voltage band requires 0 < v_min_pu < v_max_pu"});
    }
  }
  if (pcc_count == 0) out.push_back({net.id, "no PCC"});
  if (pcc_count > 1) out.push_back({net.id, "multiple PCC"});

  auto known = [&](const std::string& id) { return net.bus_index(id).has_value(); };

  for (const auto& l : net.lines) {
    if (!known(l.from_bus)) out.push_back({l.id, "unknown from_bus '" + l.from_bus + "'"});
    if (!known(l.to_bus)) out.push_back({l.id, "unknown to_bus '" + l.to_bus + "'"});
    if (l.from_bus == l.to_bus) out.push_back({l.id, "from_bus equals to_bus"});
    if (!(l.length_km > 0)) out.push_back({l.id, "length_km must be positive"});
    if (!(l.i_max_ka > 0)) out.push_back({l.id, "i_max_ka must be positive"});
    if (l.parallel_count < 1) out.push_back({l.id, "parallel_count must be >= 1"});
    if (l.r_ohm_per_km < 0 || l.x_ohm_per_km < 0 ||
        (l.r_ohm_per_km == 0 && l.x_ohm_per_km == 0)) {
      out.push_back({l.id, "impedance must be non-negative and nonzero"});
    }
    if (known(l.from_bus) && known(l.to_bus) &&
        net.bus(l.from_bus).base_kv != net.bus(l.to_bus).base_kv) {
      out.push_back({l.id, "line connects buses with different base_kv"});
    }
  }
  for (const auto& t : net.transformers) {
    if (!known(t.hv_bus)) out.push_back({t.id, "unknown hv_bus '" + t.hv_bus + "'"});
    if (!known(t.lv_bus)) out.push_back({t.id, "unknown lv_bus '" + t.lv_bus + "'"});
    if (t.hv_bus == t.lv_bus) out.push_back({t.id, "hv_bus equals lv_bus"});
    if (!(t.s_rated_mva > 0)) out.push_back({t.id, "s_rated_mva must be positive"});
    if (!(t.vk_percent > 0 && t.vk_percent < 100)) {
      out.push_back({t.id, "vk_percent must lie in (0, 100)"});
    }
    if (t.parallel_count < 1) out.push_back({t.id, "parallel_count must be >= 1"});
  }
  for (const auto& u : net.units) {
    if (!known(u.bus)) out.push_back({u.id, "unknown bus '" + u.bus + "'"});
    if (u.p_min_mw > u.p_max_mw) out.push_back({u.id, "p_min_mw exceeds p_max_mw"});
    if (u.q_min_mvar > u.q_max_mvar) out.push_back({u.id, "q_min_mvar exceeds q_max_mvar"});
    if (u.kind == UnitKind::load && u.p_max_mw > 0) {
      out.push_back({u.id, "load must not inject active power (p_max_mw > 0)"});
    }
    if (u.kind == UnitKind::generator && u.p_min_mw < 0) {
      out.push_back({u.id, "generator must not consume active power (p_min_mw < 0)"});
    }
    if (u.kind == UnitKind::equivalent_fpr && u.pq_polygon.empty() && !u.child_fpr_ref) {
      out.push_back({u.id, "equivalent_fpr unit without feasible set"});
    }
  }

  // Voltage level consistency and connectivity.
  std::set<std::string> hv_sides;
  for (const auto& t : net.transformers) hv_sides.insert(t.hv_bus);
  std::optional<VoltageLevel> level;
  for (const auto& b : net.buses) {
    if (hv_sides.count(b.id)) continue;
    if (!level) {
      level = b.voltage_level;
    } else if (*level != b.voltage_level) {
      out.push_back({b.id, std::string("voltage level ") + to_string(b.voltage_level) +
                               " differs from grid level " + to_string(*level)});
    }
  }

  if (!net.buses.empty()) {
    const std::size_t n = net.buses.size();
    std::vector<std::vector<std::size_t>> adj(n);
    auto link = [&](const std::string& a, const std::string& b) {
      auto ia = net.bus_index(a);
      auto ib = net.bus_index(b);
      if (ia && ib) {
        adj[*ia].push_back(*ib);
        adj[*ib].push_back(*ia);
      }
    };
    for (const auto& l : net.lines) link(l.from_bus, l.to_bus);
    for (const auto& t : net.transformers) link(t.hv_bus, t.lv_bus);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      for (auto j : adj[i]) {
        if (!seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) out.push_back({net.buses[i].id, "disconnected bus"});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
    if (a.element_id != b.element_id) return a.element_id < b.element_id;
    return a.message < b.message;
  });
  return out;
}

std::vector<Finding> validate_catalog_refs(const Network& net, const EquipmentCatalog& catalog) {
  std::vector<Finding> out;
  for (const auto& l : net.lines) {
    if (!catalog.line_types.count(l.type_id)) {
      out.push_back({l.id, "unresolved line type '" + l.type_id + "'"});
    }
  }
  for (const auto& t : net.transformers) {
    if (!catalog.transformer_types.count(t.type_id)) {
      out.push_back({t.id, "unresolved transformer type '" + t.type_id + "'"});
    }
  }
  return out;
}

// --- JSON ----------------------------------------------------------------

namespace {

std::string at(const std::string& source, const std::string& path) {
  return source.empty() ? path : source + ": " + path;
}

Json points_to_json(const std::vector<geometry::Point>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(Json{{"p_mw", p.p_mw}, {"q_mvar", p.q_mvar}});
  return arr;
}

std::vector<geometry::Point> points_from_json(const Json& arr, const std::string& where) {
  if (!arr.is_array()) fail(ErrorKind::schema, where + ": expected an array");
  std::vector<geometry::Point> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    io::require_keys_subset(arr[i], {"p_mw", "q_mvar"}, w);
    out.push_back({io::number_field(arr[i], "p_mw", w), io::number_field(arr[i], "q_mvar", w)});
  }
  return out;
}

const Json& array_field(const Json& doc, const char* key, const std::string& where) {
  const Json& v = io::require_field(doc, key, where);
  if (!v.is_array()) fail(ErrorKind::schema, where + "." + key + ": expected an array");
  return v;
}

int int_or(const Json& obj, const char* key, int fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) {
    fail(ErrorKind::schema, where + "." + key + ": expected an integer");
  }
  return it->get<int>();
}

Network parse_network(const Json& doc, const std::string& source) {
  io::require_keys_subset(doc, {"meta", "buses", "lines", "transformers", "units"},
                          at(source, "<root>"));
  Network net;
  const std::string mw = at(source, "meta");
  const Json& meta = io::require_field(doc, "meta", at(source, "<root>"));
  io::require_keys_subset(meta, {"id", "urbanization", "base_mva"}, mw);
  net.id = io::string_field(meta, "id", mw);
  net.urbanization = parse_urbanization(io::string_field(meta, "urbanization", mw));
  net.base_mva = io::number_field(meta, "base_mva", mw);

  std::set<std::string> seen;
  const Json& buses = array_field(doc, "buses", at(source, "<root>"));
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string w = at(source, "buses[" + std::to_string(i) + "]");
    const Json& b = buses[i];
    io::require_keys_subset(b, {"id", "voltage_level", "base_kv", "v_min_pu", "v_max_pu", "is_pcc"},
                            w);
    Bus bus;
    bus.id = io::string_field(b, "id", w);
    if (!seen.insert(bus.id).second) {
      fail(ErrorKind::schema, w + ": duplicate bus id '" + bus.id + "'");
    }
    bus.voltage_level = parse_voltage_level(io::string_field(b, "voltage_level", w));
    bus.base_kv = io::number_field(b, "base_kv", w);
    auto [vmin, vmax] = default_voltage_band(bus.voltage_level);
    bus.v_min_pu = io::number_or(b, "v_min_pu", vmin, w);
    bus.v_max_pu = io::number_or(b, "v_max_pu", vmax, w);
    bus.is_pcc = io::bool_or(b, "is_pcc", false, w);
    net.buses.push_back(bus);
  }

  seen.clear();
  const Json& lines = array_field(doc, "lines", at(source, "<root>"));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string w = at(source, "lines[" + std::to_string(i) + "]");
    const Json& l = lines[i];
    io::require_keys_subset(l,
                            {"id", "from_bus", "to_bus", "length_km", "type_id", "r_ohm_per_km",
                             "x_ohm_per_km", "i_max_ka", "parallel_count"},
                            w);
    Line line;
    line.id = io::string_field(l, "id", w);
    if (!seen.insert(line.id).second) {
      fail(ErrorKind::schema, w + ": duplicate branch id '" + line.id + "'");
    }
    line.from_bus = io::string_field(l, "from_bus", w);
    line.to_bus = io::string_field(l, "to_bus", w);
    line.length_km = io::number_field(l, "length_km", w);
    line.type_id = io::string_field(l, "type_id", w);
    line.r_ohm_per_km = io::number_field(l, "r_ohm_per_km", w);
    line.x_ohm_per_km = io::number_field(l, "x_ohm_per_km", w);
    line.i_max_ka = io::number_field(l, "i_max_ka", w);
    line.parallel_count = int_or(l, "parallel_count", 1, w);
    net.lines.push_back(line);
  }

  if (doc.contains("transformers")) {
    const Json& trafos = array_field(doc, "transformers", at(source, "<root>"));
    for (std::size_t i = 0; i < trafos.size(); ++i) {
      const std::string w = at(source, "transformers[" + std::to_string(i) + "]");
      const Json& t = trafos[i];
      io::require_keys_subset(
          t, {"id", "hv_bus", "lv_bus", "s_rated_mva", "vk_percent", "type_id", "parallel_count"},
          w);
      Transformer trafo;
      trafo.id = io::string_field(t, "id", w);
      if (!seen.insert(trafo.id).second) {
        fail(ErrorKind::schema, w + ": duplicate branch id '" + trafo.id + "'");
      }
      trafo.hv_bus = io::string_field(t, "hv_bus", w);
      trafo.lv_bus = io::string_field(t, "lv_bus", w);
      trafo.s_rated_mva = io::number_field(t, "s_rated_mva", w);
      trafo.vk_percent = io::number_field(t, "vk_percent", w);
      trafo.type_id = io::string_field(t, "type_id", w);
      trafo.parallel_count = int_or(t, "parallel_count", 1, w);
      net.transformers.push_back(trafo);
    }
  }

  seen.clear();
  const Json& units = array_field(doc, "units", at(source, "<root>"));
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string w = at(source, "units[" + std::to_string(i) + "]");
    const Json& u = units[i];
    io::require_keys_subset(u,
                            {"id", "bus", "kind", "p_min_mw", "p_max_mw", "q_min_mvar",
                             "q_max_mvar", "technology", "child_fpr_ref", "pq_polygon",
                             "child_cost"},
                            w);
    Unit unit;
    unit.id = io::string_field(u, "id", w);
    if (!seen.insert(unit.id).second) {
      fail(ErrorKind::schema, w + ": duplicate unit id '" + unit.id + "'");
    }
    unit.bus = io::string_field(u, "bus", w);
    unit.kind = parse_unit_kind(io::string_field(u, "kind", w));
    unit.p_min_mw = io::number_field(u, "p_min_mw", w);
    unit.p_max_mw = io::number_field(u, "p_max_mw", w);
    unit.q_min_mvar = io::number_field(u, "q_min_mvar", w);
    unit.q_max_mvar = io::number_field(u, "q_max_mvar", w);
    if (u.contains("technology")) unit.technology = io::string_field(u, "technology", w);
    if (u.contains("child_fpr_ref")) unit.child_fpr_ref = io::string_field(u, "child_fpr_ref", w);
    if (u.contains("pq_polygon")) unit.pq_polygon = points_from_json(u["pq_polygon"], w + ".pq_polygon");
    unit.child_cost = io::number_or(u, "child_cost", 0.0, w);
    net.units.push_back(unit);
  }
  return net;
}

void raise_findings(const std::vector<Finding>& findings, const std::string& source) {
  if (findings.empty()) return;
  ErrorKind kind = ErrorKind::schema;
  for (const auto& f : findings) {
    if (f.message == "disconnected bus" || f.message == "no PCC" || f.message == "multiple PCC" ||
        f.message.rfind("unknown ", 0) == 0) {
      kind = ErrorKind::topology;
      break;
    }
  }
  std::ostringstream msg;
  msg << source << ": " << findings.front().element_id << ": " << findings.front().message;
  if (findings.size() > 1) msg << " (and " << findings.size() - 1 << " more)";
  fail(kind, msg.str());
}

}  // namespace

Network network_from_json(const Json& doc, const std::string& source) {
  Network net = parse_network(doc, source);
  raise_findings(validate(net), source);
  return net;
}

Network network_from_json(const Json& doc, const EquipmentCatalog& catalog,
                          const std::string& source) {
  Network net = network_from_json(doc, source);
  auto refs = validate_catalog_refs(net, catalog);
  if (!refs.empty()) {
    fail(ErrorKind::catalog, source + ": " + refs.front().element_id + ": " + refs.front().message);
  }
  return net;
}

Json network_to_json(const Network& net) {
  Json doc;
  doc["meta"] = Json{{"id", net.id},
                     {"urbanization", to_string(net.urbanization)},
                     {"base_mva", net.base_mva}};
  Json buses = Json::array();
  for (const auto& b : net.buses) {
    buses.push_back(Json{{"id", b.id},
                         {"voltage_level", to_string(b.voltage_level)},
                         {"base_kv", b.base_kv},
                         {"v_min_pu", b.v_min_pu},
                         {"v_max_pu", b.v_max_pu},
                         {"is_pcc", b.is_pcc}});
  }
  doc["buses"] = std::move(buses);
  Json lines = Json::array();
  for (const auto& l : net.lines) {
    lines.push_back(Json{{"id", l.id},
                         {"from_bus", l.from_bus},
                         {"to_bus", l.to_bus},
                         {"length_km", l.length_km},
                         {"type_id", l.type_id},
                         {"r_ohm_per_km", l.r_ohm_per_km},
                         {"x_ohm_per_km", l.x_ohm_per_km},
                         {"i_max_ka", l.i_max_ka},
                         {"parallel_count", l.parallel_count}});
  }
  doc["lines"] = std::move(lines);
  Json trafos = Json::array();
  for (const auto& t : net.transformers) {
    trafos.push_back(Json{{"id", t.id},
                          {"hv_bus", t.hv_bus},
                          {"lv_bus", t.lv_bus},
                          {"s_rated_mva", t.s_rated_mva},
                          {"vk_percent", t.vk_percent},
                          {"type_id", t.type_id},
                          {"parallel_count", t.parallel_count}});
  }
  doc["transformers"] = std::move(trafos);
  Json units = Json::array();
  for (const auto& u : net.units) {
    Json j{{"id", u.id},
           {"bus", u.bus},
           {"kind", to_string(u.kind)},
           {"p_min_mw", u.p_min_mw},
           {"p_max_mw", u.p_max_mw},
           {"q_min_mvar", u.q_min_mvar},
           {"q_max_mvar", u.q_max_mvar},
           {"technology", u.technology}};
    if (u.child_fpr_ref) j["child_fpr_ref"] = *u.child_fpr_ref;
    if (!u.pq_polygon.empty()) j["pq_polygon"] = points_to_json(u.pq_polygon);
    if (u.kind == UnitKind::equivalent_fpr) j["child_cost"] = u.child_cost;
    units.push_back(std::move(j));
  }
  doc["units"] = std::move(units);
  return doc;
}

Network load_network(const std::filesystem::path& path, const EquipmentCatalog& catalog) {
  return network_from_json(io::read_json_file(path), catalog, path.string());
}

void save_network(const std::filesystem::path& path, const Network& net) {
  io::write_json_file(path, network_to_json(net));
}

Network canonical(Network net) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(net.buses.begin(), net.buses.end(), by_id);
  std::sort(net.lines.begin(), net.lines.end(), by_id);
  std::sort(net.transformers.begin(), net.transformers.end(), by_id);
  std::sort(net.units.begin(), net.units.end(), by_id);
  return net;
}

EquipmentCatalog catalog_from_json(const Json& doc, const std::string& source) {
  const std::string root = at(source, "<root>");
  io::require_keys_subset(doc, {"line_types", "transformer_types", "install_cost_per_km"}, root);
  EquipmentCatalog cat;
  const Json& lt = io::require_field(doc, "line_types", root);
  if (!lt.is_object()) fail(ErrorKind::schema, root + ".line_types: expected an object");
  for (const auto& item : lt.items()) {
    const std::string w = at(source, "line_types." + item.key());
    io::require_keys_subset(item.value(),
                            {"r_ohm_per_km", "x_ohm_per_km", "i_max_ka", "c_mat_per_km",
                             "voltage_level"},
                            w);
    LineType t;
    t.id = item.key();
    t.r_ohm_per_km = io::number_field(item.value(), "r_ohm_per_km", w);
    t.x_ohm_per_km = io::number_field(item.value(), "x_ohm_per_km", w);
    t.i_max_ka = io::number_field(item.value(), "i_max_ka", w);
    t.c_mat_per_km = io::number_field(item.value(), "c_mat_per_km", w);
    if (item.value().contains("voltage_level")) {
      t.voltage_level = parse_voltage_level(io::string_field(item.value(), "voltage_level", w));
    }
    if (t.c_mat_per_km < 0) fail(ErrorKind::schema, w + ": negative cost");
    if (!(t.i_max_ka > 0)) fail(ErrorKind::schema, w + ": i_max_ka must be positive");
    cat.line_types.emplace(t.id, t);
  }
  if (doc.contains("transformer_types")) {
    const Json& tt = doc["transformer_types"];
    if (!tt.is_object()) fail(ErrorKind::schema, root + ".transformer_types: expected an object");
    for (const auto& item : tt.items()) {
      const std::string w = at(source, "transformer_types." + item.key());
      io::require_keys_subset(item.value(),
                              {"s_rated_mva", "vk_percent", "c_trafo", "voltage_level"}, w);
      TransformerType t;
      t.id = item.key();
      t.s_rated_mva = io::number_field(item.value(), "s_rated_mva", w);
      t.vk_percent = io::number_field(item.value(), "vk_percent", w);
      t.c_trafo = io::number_field(item.value(), "c_trafo", w);
      if (item.value().contains("voltage_level")) {
        t.voltage_level = parse_voltage_level(io::string_field(item.value(), "voltage_level", w));
      }
      if (t.c_trafo < 0) fail(ErrorKind::schema, w + ": negative cost");
      cat.transformer_types.emplace(t.id, t);
    }
  }
  const Json& ic = io::require_field(doc, "install_cost_per_km", root);
  if (!ic.is_object()) fail(ErrorKind::schema, root + ".install_cost_per_km: expected an object");
  for (const auto& item : ic.items()) {
    const std::string w = at(source, "install_cost_per_km." + item.key());
    if (!item.value().is_number()) fail(ErrorKind::schema, w + ": expected a number");
    const double v = item.value().get<double>();
    if (v < 0) fail(ErrorKind::schema, w + ": negative cost");
    cat.install_cost_per_km[parse_urbanization(item.key())] = v;
  }
  return cat;
}

Json catalog_to_json(const EquipmentCatalog& catalog) {
  Json doc;
  Json lt = Json::object();
  for (const auto& [id, t] : catalog.line_types) {
    Json j{{"r_ohm_per_km", t.r_ohm_per_km},
           {"x_ohm_per_km", t.x_ohm_per_km},
           {"i_max_ka", t.i_max_ka},
           {"c_mat_per_km", t.c_mat_per_km}};
    if (t.voltage_level) j["voltage_level"] = to_string(*t.voltage_level);
    lt[id] = std::move(j);
  }
  doc["line_types"] = std::move(lt);
  Json tt = Json::object();
  for (const auto& [id, t] : catalog.transformer_types) {
    Json j{{"s_rated_mva", t.s_rated_mva}, {"vk_percent", t.vk_percent}, {"c_trafo", t.c_trafo}};
    if (t.voltage_level) j["voltage_level"] = to_string(*t.voltage_level);
    tt[id] = std::move(j);
  }
  doc["transformer_types"] = std::move(tt);
  Json ic = Json::object();
  for (const auto& [u, v] : catalog.install_cost_per_km) ic[to_string(u)] = v;
  doc["install_cost_per_km"] = std::move(ic);
  return doc;
}

EquipmentCatalog load_catalog(const std::filesystem::path& path) {
  return catalog_from_json(io::read_json_file(path), path.string());
}

}  // namespace fpr::grid
