#include <doctest.h>

#include <cmath>

#include "fpr/cep.hpp"
#include "fpr/error.hpp"
#include "support.hpp"

using namespace fpr;

namespace {

builder::LinearFprModel flat_model(double capex, double m_max) {
  builder::LinearFprModel m;
  m.capex_per_mw = capex;
  m.m_min_mw = 0;
  m.m_max_mw = m_max;
  m.f_min_pu = -1;
  m.f_max_pu = 1;
  return m;
}

// One TSO node with gas, one DSO behind a link, two snapshots.
cep::CepModel small_model() {
  cep::CepModel m;
  m.id = "small";
  m.nodes = {"tso"};
  m.weights = {1.0, 1.0};
  m.demand["tso"] = {2.0, 2.0};
  cep::Generator gas;
  gas.id = "gas";
  gas.node = "tso";
  gas.technology = "gas";
  gas.capex_per_mw = 10;
  gas.marginal_cost = 1;
  gas.availability = {1.0, 1.0};
  m.generators.push_back(gas);
  cep::DsoLink d;
  d.id = "d";
  d.node = "tso";
  d.dso_node = "dso";
  d.model = flat_model(5, 100);
  d.demand = {3.0, 1.0};
  d.loss = 0.0;
  m.dso_links.push_back(d);
  m.flow_cost_per_mwh = 0.0;
  return m;
}

}  // namespace

TEST_CASE("hand-solvable dispatch") {
  const auto m = small_model();
  const auto s = cep::solve(m);
  REQUIRE(s.status == lp::Status::optimal);
  // gas 5 MW at t0 sets capacity; link carries 3 MW at peak.
  CHECK(s.capacities.at("gas") == doctest::Approx(5));
  CHECK(s.capacities.at("d") == doctest::Approx(3));
  CHECK(s.objective == doctest::Approx(10 * 5 + (5 + 3) + 5 * 3));
}

TEST_CASE("link losses and uncapped scenario") {
  auto m = small_model();
  m.dso_links[0].loss = 0.1;
  const auto s = cep::solve(m);
  REQUIRE(s.status == lp::Status::optimal);
  CHECK(s.capacities.at("d") == doctest::Approx(3 / 0.9));
  const auto a = cep::derive_scenario_a(m);
  CHECK(a.dso_links[0].uncapped);
  const auto sa = cep::solve(a);
  REQUIRE(sa.status == lp::Status::optimal);
  CHECK(sa.objective < s.objective);
}

TEST_CASE("base cost enters as a constant") {
  auto m = small_model();
  const double before = cep::solve(m).objective;
  m.dso_links[0].model.base_cost = 1000;
  m.dso_links[0].grid_count = 2;
  m.dso_links[0].annuity_factor = 0.5;
  const auto built = cep::build(m);
  CHECK(built.problem.objective_constant == doctest::Approx(1000));
  // Capacity per grid doubles the ceiling, the objective only shifts.
  CHECK(cep::solve(m, built).objective == doctest::Approx(before + 1000 - 5 * 3 + 2.5 * 3));
}

TEST_CASE("link capacity ceiling makes the model infeasible") {
  auto m = small_model();
  m.dso_links[0].model = flat_model(5, 2);
  CHECK(cep::solve(m).status == lp::Status::infeasible);
  CHECK_THROWS_AS(cep::run_study(cep::derive_scenario_a(m), m), Error);
}

TEST_CASE("storage shifts energy across snapshots") {
  cep::CepModel m;
  m.nodes = {"n"};
  m.weights = {1.0, 1.0};
  m.demand["n"] = {0.0, 1.0};
  cep::Generator pv;
  pv.id = "pv";
  pv.node = "n";
  pv.availability = {1.0, 0.0};
  pv.capex_per_mw = 1;
  m.generators.push_back(pv);
  cep::Storage bat;
  bat.id = "bat";
  bat.node = "n";
  bat.efficiency = 0.5;
  bat.capex_per_mwh = 1;
  m.storage.push_back(bat);
  const auto s = cep::solve(m);
  REQUIRE(s.status == lp::Status::optimal);
  CHECK(s.capacities.at("pv") == doctest::Approx(2));
  CHECK(s.capacities.at("bat:energy") == doctest::Approx(1));
}

TEST_CASE("profile length mismatch is rejected") {
  auto m = small_model();
  m.generators[0].availability = {1.0};
  CHECK_THROWS_AS(cep::validate(m), Error);
  m = small_model();
  m.dso_links[0].dso_node = "tso";
  CHECK_THROWS_AS(cep::validate(m), Error);
}

TEST_CASE("toy study loads and reports") {
  const auto b = cep::load_model(support::data("toy_study.json"));
  CHECK(b.snapshot_count() == 24);
  const auto report = cep::run_study(cep::derive_scenario_a(b), b);
  CHECK(report.solution_a.status == lp::Status::optimal);
  CHECK(report.solution_b.status == lp::Status::optimal);
  double provided = 0, consumed = 0;
  for (const auto& r : report.rows) {
    if (r.scenario != "B") continue;
    provided += r.provided_mwh;
    consumed += r.consumed_mwh;
  }
  CHECK(provided == doctest::Approx(consumed).epsilon(1e-6));
  const auto csv = cep::report_csv(report.rows);
  CHECK(csv.rfind("scenario,technology,provided_mwh,consumed_mwh\n", 0) == 0);
  CHECK(cep::summary_csv(report).find("\nB,") != std::string::npos);
  CHECK(lp::from_lp_text(lp::to_lp_text(report.lp_b.problem)).variable_count() ==
        report.lp_b.problem.variable_count());
}

TEST_CASE("string model references use the resolver") {
  Json doc = Json::parse(R"({"nodes": ["t"], "weights": [1], "demand": {"t": 0},
    "dso_links": [{"id": "d", "node": "t", "linear_model": "grid:x"}]})");
  std::string asked;
  CHECK_THROWS(cep::model_from_json(doc, "doc", [&](const std::string& r) {
    asked = r;
    return std::filesystem::path("/nonexistent/lm.json");
  }));
  CHECK(asked == "grid:x");
}
