#include <doctest.h>

#include <random>

#include "fpr/error.hpp"
#include "fpr/fpr_builder.hpp"
#include "fpr/io.hpp"
#include "support.hpp"

using namespace fpr;
using builder::StageRegion;

namespace {

StageRegion region_of(double cost, double radius, int ref) {
  StageRegion s;
  s.grid_id = "g";
  s.cost = cost;
  s.stage_ref = ref;
  s.polygon = support::make_polygon({{-radius, -radius}, {radius, -radius}, {radius, radius}, {-radius, radius}});
  return s;
}

}  // namespace

TEST_CASE("equal-cost rule") {
  CHECK(builder::same_cost(100000.0, 100000.05));
  CHECK_FALSE(builder::same_cost(100000.0, 100001.0));
  CHECK(builder::same_cost(0.0, 1e-7));
  CHECK_FALSE(builder::same_cost(0.0, 1e-5));
}

TEST_CASE("assembly sorts and keeps the larger polygon") {
  const std::vector<StageRegion> in{region_of(500, 1, 0), region_of(0, 2, 1), region_of(500, 3, 2),
                                    region_of(500, 2, 3), region_of(100, 1, 4)};
  const auto fpr = builder::assemble(in);
  REQUIRE(fpr.entries.size() == 3);
  CHECK(fpr.entries[0].cost == 0);
  CHECK(fpr.entries[1].cost == 100);
  CHECK(fpr.entries[2].stage_ref == 2);
}

TEST_CASE("area ties go to the lowest stage reference") {
  const std::vector<StageRegion> in{region_of(7, 1, 5), region_of(7, 1, 2), region_of(7, 1, 9)};
  CHECK(builder::assemble(in).entries.at(0).stage_ref == 2);
}

TEST_CASE("assembly rejects empty and mixed input") {
  CHECK_THROWS_AS(builder::assemble(std::vector<StageRegion>{}), Error);
  auto a = region_of(0, 1, 0);
  auto b = region_of(1, 1, 1);
  b.grid_class.urbanization = grid::Urbanization::urban;
  CHECK_THROWS_AS(builder::assemble(std::vector<StageRegion>{a, b}), Error);
}

TEST_CASE("capacity metrics") {
  const auto poly = support::make_polygon({{-3, 0}, {1, -4}, {2, 2}});
  CHECK(builder::capacity(poly, builder::CapacityMetric::max_abs_p) == doctest::Approx(3));
  CHECK(builder::capacity(poly, builder::CapacityMetric::max_apparent) == doctest::Approx(std::hypot(1, 4)));
}

TEST_CASE("nonnegative least squares") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  auto f = builder::fit_nonnegative_line(x, y);
  CHECK(f.a == doctest::Approx(2));
  CHECK(f.b == doctest::Approx(1));
  CHECK(f.sse == doctest::Approx(0).epsilon(1e-12));

  // A negative intercept is clamped: fit through the origin.
  const std::vector<double> y2{0, 2, 4, 6};
  f = builder::fit_nonnegative_line(x, y2);
  CHECK(f.b == 0.0);
  CHECK(f.a == doctest::Approx((0 * 1 + 2 * 2 + 4 * 3 + 6 * 4) / 30.0));

  // Decreasing data gives a flat line at the mean.
  const std::vector<double> y3{8, 6, 4, 2};
  f = builder::fit_nonnegative_line(x, y3);
  CHECK(f.a == 0.0);
  CHECK(f.b == doctest::Approx(5));
}

TEST_CASE("linear model bounds") {
  builder::Fpr fpr;
  fpr.grid_id = "g";
  for (int i = 0; i < 3; ++i) {
    builder::FprEntry e;
    e.cost = 1000.0 * i;
    e.polygon = support::make_polygon({{-1.0 - i, -1}, {2.0 + i, -1}, {2.0 + i, 1}, {-1.0 - i, 1}});
    fpr.entries.push_back(e);
  }
  const auto m = builder::linearize(fpr, {builder::CapacityMetric::max_abs_p, 12.5});
  CHECK(m.m_min_mw == doctest::Approx(2));
  CHECK(m.m_max_mw == doctest::Approx(4));
  CHECK(m.f_max_pu == doctest::Approx(1.0));
  CHECK(m.f_min_pu == doctest::Approx(-3.0 / 4.0));
  CHECK(m.opex_per_mwh == 12.5);
  CHECK_FALSE(m.degenerate);
  const auto back = builder::linear_model_from_json(builder::linear_model_to_json(m), "lm");
  CHECK(back.capex_per_mw == m.capex_per_mw);
  CHECK(back.f_min_pu == m.f_min_pu);
}

TEST_CASE("single-capacity FPRs are degenerate") {
  builder::Fpr fpr;
  fpr.grid_id = "g";
  for (int i = 0; i < 2; ++i) {
    builder::FprEntry e;
    e.cost = 100.0 * (i + 1);
    e.polygon = support::make_polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
    fpr.entries.push_back(e);
  }
  const auto m = builder::linearize(fpr);
  CHECK(m.degenerate);
  CHECK(m.capex_per_mw == 0);
  CHECK(m.base_cost == doctest::Approx(150));
  CHECK_FALSE(m.warning.empty());
}

TEST_CASE("child selection and embedding") {
  builder::Fpr child;
  child.grid_id = "lv";
  for (int i = 0; i < 3; ++i) {
    builder::FprEntry e;
    e.cost = 10.0 * i;
    e.scale_factor = 1.0 + i;
    e.stage_ref = i;
    e.polygon = support::make_polygon({{-0.1, -0.05}, {0.2, -0.05}, {0.2, 0.05}, {-0.1, 0.05}});
    child.entries.push_back(e);
  }
  CHECK(builder::select_entry(child, builder::ChildSelection::by_scale, 2.0).stage_ref == 1);
  CHECK(builder::select_entry(child, builder::ChildSelection::by_scale, 2.5).stage_ref == 1);
  CHECK(builder::select_entry(child, builder::ChildSelection::by_scale, 0.5).stage_ref == 0);
  CHECK(builder::select_entry(child, builder::ChildSelection::largest, 1.0).stage_ref == 2);

  const auto parent = support::network("mv_grid.json");
  auto net = builder::embed_child(parent, child, "mv1", builder::ChildSelection::by_scale, 2.0);
  net = builder::embed_child(net, child, "mv3", builder::ChildSelection::by_scale, 3.0);
  REQUIRE(net.units.size() == parent.units.size() + 2);
  const auto* u1 = net.find_unit("fpr_lv");
  const auto* u2 = net.find_unit("fpr_lv_2");
  REQUIRE(u1);
  REQUIRE(u2);
  CHECK(u1->kind == grid::UnitKind::equivalent_fpr);
  CHECK(u1->bus == "mv1");
  CHECK(u1->child_cost == 10.0);
  CHECK(u2->child_cost == 20.0);
  // Import [-0.1, 0.2] becomes injection [-0.2, 0.1].
  CHECK(u1->p_min_mw == doctest::Approx(-0.2));
  CHECK(u1->p_max_mw == doctest::Approx(0.1));
  CHECK(expansion::embedded_child_cost(net) == doctest::Approx(30.0));
  CHECK_THROWS_AS(builder::embed_child(parent, child, "nowhere", builder::ChildSelection::largest), Error);
}

TEST_CASE("FPR serialization") {
  std::mt19937_64 rng(3);
  builder::Fpr fpr;
  fpr.grid_id = "g";
  for (int i = 0; i < 3; ++i) {
    builder::FprEntry e;
    e.cost = 5.0 * i;
    e.polygon = support::random_polygon(rng, 1.0, 8);
    e.stage_ref = i;
    fpr.entries.push_back(e);
  }
  const auto back = builder::fpr_from_json(builder::fpr_to_json(fpr), "fpr");
  REQUIRE(back.entries.size() == 3);
  CHECK(back.entries[2].polygon.vertices == fpr.entries[2].polygon.vertices);
  CHECK(io::dump(builder::fpr_to_json(back)) == io::dump(builder::fpr_to_json(fpr)));
  CHECK(builder::fpr_curve_csv(fpr).rfind("cost,area,R\n", 0) == 0);
}
