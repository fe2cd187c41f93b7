#include <doctest.h>

#include <cmath>

#include "fpr/error.hpp"
#include "fpr/grid_model.hpp"
#include "fpr/io.hpp"
#include "support.hpp"

using namespace fpr;

namespace {

Json minimal_grid() {
  return Json::parse(R"({
    "meta": {"id": "g", "urbanization": "urban", "base_mva": 1.0},
    "buses": [{"id": "a", "voltage_level": "MV", "base_kv": 20, "is_pcc": true},
              {"id": "b", "voltage_level": "MV", "base_kv": 20}],
    "lines": [{"id": "l", "from_bus": "a", "to_bus": "b", "length_km": 2, "type_id": "NA2XS2Y_1x95",
               "r_ohm_per_km": 0.313, "x_ohm_per_km": 0.132, "i_max_ka": 0.252}],
    "units": [{"id": "u", "bus": "b", "kind": "load", "p_min_mw": -1, "p_max_mw": 0,
               "q_min_mvar": -0.2, "q_max_mvar": 0}]
  })");
}

ErrorKind kind_of(const Json& doc) {
  try {
    grid::network_from_json(doc, support::catalog(), "doc");
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("fixtures load and validate") {
  for (const char* f : {"two_bus_analytic.json", "lv_feeder.json", "lv_feeder_b.json", "mv_grid.json",
                        "degenerate_box.json", "degenerate_disk.json"}) {
    CAPTURE(f);
    const auto net = support::network(f);
    CHECK(grid::validate(net).empty());
    CHECK(net.buses.at(net.pcc_index()).is_pcc);
  }
}

TEST_CASE("per-unit impedances and ratings") {
  const auto net = grid::network_from_json(minimal_grid(), support::catalog(), "g");
  const auto z = grid::line_impedance_pu(net, net.lines[0]);
  CHECK(z.real() == doctest::Approx(0.626 / 400.0));
  CHECK(z.imag() == doctest::Approx(0.264 / 400.0));
  CHECK(grid::line_rating_mva(net, net.lines[0]) == doctest::Approx(0.252 * std::sqrt(3.0) * 20));

  auto twice = net;
  twice.lines[0].parallel_count = 2;
  CHECK(grid::line_impedance_pu(twice, twice.lines[0]).real() == doctest::Approx(z.real() / 2));
  CHECK(grid::line_rating_mva(twice, twice.lines[0]) == doctest::Approx(2 * grid::line_rating_mva(net, net.lines[0])));

  const auto lv = support::network("lv_feeder.json");
  const auto& t = lv.transformers.at(0);
  CHECK(grid::transformer_impedance_pu(lv, t).imag() == doctest::Approx(0.04 * 1.0 / 0.25));
  CHECK(grid::transformer_rating_mva(t) == doctest::Approx(0.25));
}

TEST_CASE("JSON round trip is lossless") {
  const auto net = support::network("mv_grid.json");
  const auto back = grid::network_from_json(grid::network_to_json(net), support::catalog(), "rt");
  CHECK(back == net);
  CHECK(io::dump(grid::network_to_json(back)) == io::dump(grid::network_to_json(net)));
}

TEST_CASE("malformed grids raise the matching error kind") {
  auto doc = minimal_grid();
  doc["buses"][1]["id"] = "a";
  CHECK(kind_of(doc) == ErrorKind::schema);

  doc = minimal_grid();
  doc["buses"][0]["is_pcc"] = false;
  CHECK(kind_of(doc) == ErrorKind::topology);

  doc = minimal_grid();
  doc["lines"][0]["to_bus"] = "nowhere";
  CHECK(kind_of(doc) == ErrorKind::topology);

  doc = minimal_grid();
  doc["buses"].push_back(Json{{"id", "island"}, {"voltage_level", "MV"}, {"base_kv", 20}});
  CHECK(kind_of(doc) == ErrorKind::topology);

  doc = minimal_grid();
  doc["lines"][0]["type_id"] = "no_such_cable";
  CHECK(kind_of(doc) == ErrorKind::catalog);

  doc = minimal_grid();
  doc["units"][0]["p_max_mw"] = 0.5;
  CHECK(kind_of(doc) == ErrorKind::schema);

  doc = minimal_grid();
  doc["meta"]["urbanization"] = "metropolis";
  CHECK(kind_of(doc) == ErrorKind::schema);
}

TEST_CASE("catalog lookups") {
  const auto& cat = support::catalog();
  CHECK(cat.install_cost(grid::Urbanization::suburban) == 80000);
  const auto lv = cat.line_types_by_ampacity(grid::VoltageLevel::lv);
  REQUIRE(lv.size() == 4);
  for (std::size_t i = 1; i < lv.size(); ++i) CHECK(lv[i - 1]->i_max_ka <= lv[i]->i_max_ka);
  CHECK_THROWS_AS(cat.line_type("nope"), Error);
  CHECK(support::network("mv_grid.json").grid_level() == grid::VoltageLevel::mv);
  CHECK(support::network("lv_feeder.json").grid_level() == grid::VoltageLevel::lv);
}

TEST_CASE("missing files are io errors") {
  try {
    grid::load_network("/nonexistent/grid.json", support::catalog());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}
