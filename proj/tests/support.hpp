#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fpr/for_engine.hpp"
#include "fpr/geometry.hpp"
#include "fpr/grid_model.hpp"

namespace support {

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(FPR_DATA_DIR) / name;
}

/// Fresh, empty directory below the test scratch area.
inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::path(FPR_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline const fpr::grid::EquipmentCatalog& catalog() {
  static const auto c = fpr::grid::load_catalog(data("catalog.json"));
  return c;
}

inline fpr::grid::Network network(const std::string& name) {
  return fpr::grid::load_network(data(name), catalog());
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Polygon with the given vertices, in the layout compute_for produces.
inline fpr::region::ForPolygon make_polygon(std::vector<fpr::geometry::Point> vertices) {
  fpr::region::ForPolygon poly;
  poly.vertices = std::move(vertices);
  for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
    poly.theta_deg.push_back(360.0 * static_cast<double>(k) / static_cast<double>(poly.vertices.size()));
  }
  poly.area_mva2 = fpr::geometry::area(poly.vertices);
  return poly;
}

/// Star-shaped counterclockwise polygon around the origin with radii in
/// [0.5, 1] * radius.
inline fpr::region::ForPolygon random_polygon(std::mt19937_64& rng, double radius, int n = 24) {
  std::uniform_real_distribution<double> u(0.5, 1.0);
  std::vector<fpr::geometry::Point> v;
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    const double r = radius * u(rng);
    v.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return make_polygon(std::move(v));
}

/// Swaps a line to a catalog type, keeping length and parallel count.
inline void set_line_type(fpr::grid::Network& net, const std::string& line_id, const std::string& type_id) {
  const auto& t = catalog().line_type(type_id);
  for (auto& l : net.lines) {
    if (l.id != line_id) continue;
    l.type_id = t.id;
    l.r_ohm_per_km = t.r_ohm_per_km;
    l.x_ohm_per_km = t.x_ohm_per_km;
    l.i_max_ka = t.i_max_ka;
  }
}

inline void set_transformer_type(fpr::grid::Network& net, const std::string& trafo_id, const std::string& type_id) {
  const auto& t = catalog().transformer_type(type_id);
  for (auto& tr : net.transformers) {
    if (tr.id != trafo_id) continue;
    tr.type_id = t.id;
    tr.s_rated_mva = t.s_rated_mva;
    tr.vk_percent = t.vk_percent;
  }
}

}  // namespace support
