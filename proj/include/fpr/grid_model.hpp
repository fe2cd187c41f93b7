#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpr/geometry.hpp"
#include "fpr/io.hpp"

namespace fpr::grid {

enum class VoltageLevel { lv, mv, hv };
enum class Urbanization { rural, suburban, urban };
enum class UnitKind { load, generator, equivalent_fpr };

const char* to_string(VoltageLevel level);
const char* to_string(Urbanization urbanization);
const char* to_string(UnitKind kind);
VoltageLevel parse_voltage_level(const std::string& text);
Urbanization parse_urbanization(const std::string& text);
UnitKind parse_unit_kind(const std::string& text);

/// Default voltage band for a level: 0.90/1.10 pu on LV, 0.95/1.05 pu above.
std::pair<double, double> default_voltage_band(VoltageLevel level);

struct Bus {
  std::string id;
  VoltageLevel voltage_level = VoltageLevel::lv;
  double base_kv = 0.4;
  double v_min_pu = 0.9;
  double v_max_pu = 1.1;
  bool is_pcc = false;

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct Line {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double length_km = 0.0;
  std::string type_id;
  double r_ohm_per_km = 0.0;
  double x_ohm_per_km = 0.0;
  double i_max_ka = 0.0;
  int parallel_count = 1;

  friend bool operator==(const Line&, const Line&) = default;
};

struct Transformer {
  std::string id;
  std::string hv_bus;
  std::string lv_bus;
  double s_rated_mva = 0.0;
  double vk_percent = 0.0;
  std::string type_id;
  int parallel_count = 1;

  friend bool operator==(const Transformer&, const Transformer&) = default;
};

/// Load, generator, or the equivalent of an embedded child grid. Injection
/// into the grid is positive; loads therefore have p_max_mw <= 0.
struct Unit {
  std::string id;
  std::string bus;
  UnitKind kind = UnitKind::load;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double q_min_mvar = 0.0;
  double q_max_mvar = 0.0;
  std::string technology;
  std::optional<std::string> child_fpr_ref;
  /// Feasible PQ set of an equivalent_fpr unit, in injection convention.
  std::vector<geometry::Point> pq_polygon;
  /// Grid cost of the child expansion stage represented by this unit.
  double child_cost = 0.0;

  friend bool operator==(const Unit&, const Unit&) = default;
};

struct Network {
  std::string id;
  Urbanization urbanization = Urbanization::rural;
  double base_mva = 1.0;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Transformer> transformers;
  std::vector<Unit> units;

  std::optional<std::size_t> bus_index(const std::string& bus_id) const;
  std::size_t pcc_index() const;
  const Bus& bus(const std::string& bus_id) const;
  Unit* find_unit(const std::string& unit_id);
  const Unit* find_unit(const std::string& unit_id) const;
  /// Voltage level shared by all buses except transformer HV sides.
  VoltageLevel grid_level() const;

  friend bool operator==(const Network&, const Network&) = default;
};

struct LineType {
  std::string id;
  double r_ohm_per_km = 0.0;
  double x_ohm_per_km = 0.0;
  double i_max_ka = 0.0;
  double c_mat_per_km = 0.0;
  std::optional<VoltageLevel> voltage_level;
};

struct TransformerType {
  std::string id;
  double s_rated_mva = 0.0;
  double vk_percent = 0.0;
  double c_trafo = 0.0;
  std::optional<VoltageLevel> voltage_level;
};

struct EquipmentCatalog {
  std::map<std::string, LineType> line_types;
  std::map<std::string, TransformerType> transformer_types;
  std::map<Urbanization, double> install_cost_per_km;

  const LineType& line_type(const std::string& id) const;
  const TransformerType& transformer_type(const std::string& id) const;
  double install_cost(Urbanization urbanization) const;
  /// Line types usable at `level`, ascending by ampacity then id.
  std::vector<const LineType*> line_types_by_ampacity(VoltageLevel level) const;
  std::vector<const TransformerType*> transformer_types_by_rating(VoltageLevel lv_level) const;
};

// --- per-unit conversion -------------------------------------------------

inline double impedance_base_ohm(double base_kv, double base_mva) {
  return base_kv * base_kv / base_mva;
}
inline double ohm_to_pu(double ohm, double base_kv, double base_mva) {
  return ohm / impedance_base_ohm(base_kv, base_mva);
}
inline double pu_to_ohm(double pu, double base_kv, double base_mva) {
  return pu * impedance_base_ohm(base_kv, base_mva);
}

/// Series impedance of all parallel circuits of a line on the system base.
std::complex<double> line_impedance_pu(const Network& net, const Line& line);
/// Short-circuit reactance from vk_percent on the transformer's own rating.
std::complex<double> transformer_impedance_pu(const Network& net, const Transformer& trafo);
/// Thermal rating in MVA: ampacity * sqrt(3) * base_kv * parallel_count.
double line_rating_mva(const Network& net, const Line& line);
double transformer_rating_mva(const Transformer& trafo);

// --- validation ----------------------------------------------------------

struct Finding {
  std::string element_id;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Invariant violations sorted by element id, then message. Empty iff valid.
std::vector<Finding> validate(const Network& net);
/// Type ids that do not resolve in the catalog.
std::vector<Finding> validate_catalog_refs(const Network& net, const EquipmentCatalog& catalog);

// --- file I/O ------------------------------------------------------------

EquipmentCatalog catalog_from_json(const Json& doc, const std::string& source);
Json catalog_to_json(const EquipmentCatalog& catalog);
EquipmentCatalog load_catalog(const std::filesystem::path& path);

/// Parses the grid schema; throws schema, topology or catalog errors.
Network network_from_json(const Json& doc, const EquipmentCatalog& catalog,
                          const std::string& source);
/// Parses without catalog resolution (used for embedded stage networks).
Network network_from_json(const Json& doc, const std::string& source);
Json network_to_json(const Network& net);
Network load_network(const std::filesystem::path& path, const EquipmentCatalog& catalog);
void save_network(const std::filesystem::path& path, const Network& net);

/// Canonical element ordering (buses, lines, transformers, units by id).
Network canonical(Network net);

}  // namespace fpr::grid
