#include <doctest.h>

#include <cmath>
#include <set>

#include "fpr/error.hpp"
#include "fpr/scenario_gen.hpp"
#include "support.hpp"

using namespace fpr;

TEST_CASE("scenario count, ids and scaling") {
  const auto net = support::network("lv_feeder.json");
  scenario::ScenarioConfig cfg;
  cfg.n_random_draws = 3;
  cfg.scale_factors = {1.0, 2.0};
  cfg.master_seed = 5;
  const auto sc = scenario::generate(net, cfg);
  REQUIRE(sc.size() == 6);
  const auto base = scenario::capacity_totals(net);
  for (std::size_t i = 0; i < sc.size(); ++i) {
    CHECK(sc[i].scenario_id == static_cast<int>(i));
    const auto t = scenario::capacity_totals(scenario::apply(net, sc[i]));
    CHECK(t.generation_mw == doctest::Approx(base.generation_mw * sc[i].scale_factor));
    CHECK(t.load_mw == doctest::Approx(base.load_mw * sc[i].scale_factor));
  }
}

TEST_CASE("generation is deterministic and seed dependent") {
  const auto net = support::network("lv_feeder.json");
  scenario::ScenarioConfig cfg;
  cfg.n_random_draws = 4;
  cfg.master_seed = 11;
  CHECK(scenario::generate(net, cfg) == scenario::generate(net, cfg));
  auto other = cfg;
  other.master_seed = 12;
  CHECK_FALSE(scenario::generate(net, cfg) == scenario::generate(net, other));
  CHECK(scenario::derive_seed(1, 2, 3) != scenario::derive_seed(1, 3, 2));
}

TEST_CASE("only candidate buses receive capacity") {
  const auto net = support::network("lv_feeder.json");
  scenario::ScenarioConfig cfg;
  cfg.n_random_draws = 5;
  for (const auto& s : scenario::generate(net, cfg)) {
    const auto applied = scenario::apply(net, s);
    CHECK(applied.buses == net.buses);
    CHECK(applied.lines == net.lines);
    for (std::size_t i = 0; i < net.units.size(); ++i) {
      CHECK(applied.units[i].bus == net.units[i].bus);
      CHECK(applied.units[i].kind == net.units[i].kind);
    }
  }
}

TEST_CASE("scenario JSON round trip") {
  const auto net = support::network("mv_grid.json");
  scenario::ScenarioConfig cfg;
  cfg.n_random_draws = 2;
  const auto sc = scenario::generate(net, cfg);
  CHECK(scenario::scenarios_from_json(scenario::scenarios_to_json(sc)) == sc);
}

TEST_CASE("invalid configurations") {
  scenario::ScenarioConfig cfg;
  cfg.n_random_draws = 0;
  CHECK_THROWS_AS(scenario::check_config(cfg), Error);
  cfg = {};
  cfg.scale_factors = {1.0, -1.0};
  CHECK_THROWS_AS(scenario::check_config(cfg), Error);
  cfg = {};
  cfg.scale_factors = {};
  CHECK_THROWS_AS(scenario::check_config(cfg), Error);
  CHECK_THROWS_AS(scenario::config_from_json(Json::parse(R"({"n_random_draws": 1, "bogus": 2})"), "cfg"), Error);
}
