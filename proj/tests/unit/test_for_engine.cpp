#include <doctest.h>

#include <cmath>

#include "fpr/error.hpp"
#include "fpr/for_engine.hpp"
#include "fpr/geometry.hpp"
#include "fpr/io.hpp"
#include "oracles/brute_for.hpp"
#include "support.hpp"

using namespace fpr;

TEST_CASE("tolerance follows the grid peak") {
  const auto net = support::network("degenerate_box.json");
  CHECK(region::grid_peak_mw(net) == doctest::Approx(3.0));
  CHECK(region::default_tolerance_mw(net) == doctest::Approx(0.03));
}

TEST_CASE("oracle accepts interior points and rejects far ones") {
  const auto net = support::network("lv_feeder.json");
  const region::FeasibilityOracle oracle(net, 0.0005);
  REQUIRE(oracle.high_load_point());
  REQUIRE(oracle.high_feed_in_point());
  const auto hl = *oracle.high_load_point();
  const auto d = oracle.feasible(hl);
  REQUIRE(d);
  CHECK(region::certificate_holds(net, *d, hl, 0.0005));
  CHECK_FALSE(oracle.feasible({5.0, 0.0}));
  CHECK_FALSE(oracle.feasible({0.0, -5.0}));
}

TEST_CASE("box fixture polygon hugs the box") {
  const auto net = support::network("degenerate_box.json");
  region::SweepConfig cfg;
  cfg.n_directions = 72;
  const auto poly = region::compute_for(net, cfg);
  const auto box = oracle::import_box(net);
  CHECK(poly.vertices.size() == 72);
  CHECK(geometry::is_simple(poly.vertices));
  CHECK(geometry::signed_area(poly.vertices) > 0);
  CHECK(poly.area_mva2 == doctest::Approx(oracle::box_area(box)).epsilon(0.05));
  for (const auto& v : poly.vertices) {
    CHECK(v.p_mw >= box.p_lo - poly.tolerance_mw);
    CHECK(v.p_mw <= box.p_hi + poly.tolerance_mw);
  }
}

TEST_CASE("certificates hold and results do not depend on the thread count") {
  const auto net = support::network("lv_feeder_b.json");
  region::SweepConfig cfg;
  cfg.n_directions = 16;
  cfg.jobs = 1;
  const auto a = region::compute_for(net, cfg);
  cfg.jobs = 4;
  const auto b = region::compute_for(net, cfg);
  CHECK(a.vertices == b.vertices);
  for (std::size_t k = 0; k < a.vertices.size(); ++k) {
    std::string why;
    CHECK_MESSAGE(region::certificate_holds(net, a.certificates[k].dispatch, a.vertices[k], a.tolerance_mw, &why), why);
    CHECK(a.certificates[k].bisection_gap_mw <= a.tolerance_mw);
    CHECK(a.theta_deg[k] == doctest::Approx(22.5 * k));
  }
}

TEST_CASE("tampered certificates are caught") {
  const auto net = support::network("lv_feeder.json");
  region::SweepConfig cfg;
  cfg.n_directions = 8;
  const auto poly = region::compute_for(net, cfg);
  auto d = poly.certificates[0].dispatch;
  d.setpoints.begin()->second.p_mw += 1.0;  // outside its range
  CHECK_FALSE(region::certificate_holds(net, d, poly.vertices[0], poly.tolerance_mw));
  const geometry::Point shifted{poly.vertices[0].p_mw + 10 * poly.tolerance_mw, poly.vertices[0].q_mvar};
  CHECK_FALSE(region::certificate_holds(net, poly.certificates[0].dispatch, shifted, poly.tolerance_mw));
}

TEST_CASE("too few directions is an argument error") {
  region::SweepConfig cfg;
  cfg.n_directions = 4;
  CHECK_THROWS_AS(region::compute_for(support::network("degenerate_box.json"), cfg), Error);
}

TEST_CASE("serialization") {
  const auto net = support::network("degenerate_box.json");
  region::SweepConfig cfg;
  cfg.n_directions = 8;
  const auto poly = region::compute_for(net, cfg);
  const auto back = region::for_from_json(region::for_to_json(poly), "for");
  CHECK(back.vertices == poly.vertices);
  CHECK(back.theta_deg == poly.theta_deg);
  CHECK(back.area_mva2 == poly.area_mva2);
  const auto csv = region::for_to_csv(poly);
  CHECK(csv.rfind("theta_deg,p_mw,q_mvar\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
