#include <doctest.h>

#include <random>

#include "fpr/error.hpp"
#include "fpr/lp.hpp"
#include "oracles/lp_enumeration.hpp"

using namespace fpr;
using lp::Sense;

TEST_CASE("textbook maximization") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
  lp::Problem p;
  const int x = p.add_variable("x", -3);
  const int y = p.add_variable("y", -5);
  p.add_row("a", "t", {{x, 1}}, Sense::le, 4);
  p.add_row("b", "t", {{y, 2}}, Sense::le, 12);
  p.add_row("c", "t", {{x, 3}, {y, 2}}, Sense::le, 18);
  const auto s = lp::solve(p);
  REQUIRE(s.status == lp::Status::optimal);
  CHECK(s.objective == doctest::Approx(-36));
  CHECK(s.x[x] == doctest::Approx(2));
  CHECK(s.x[y] == doctest::Approx(6));
}

TEST_CASE("bounds, equalities and free variables") {
  lp::Problem p;
  const int a = p.add_variable("a", 1, -lp::kInf, lp::kInf);
  const int b = p.add_variable("b", 2, -3, 5);
  p.add_row("eq", "t", {{a, 1}, {b, 1}}, Sense::eq, 1);
  p.add_row("ge", "t", {{a, 1}}, Sense::ge, -10);
  p.objective_constant = 7;
  const auto s = lp::solve(p);
  REQUIRE(s.status == lp::Status::optimal);
  // a = 1 - b, cost = 1 - b + 2b = 1 + b minimal at b = -3
  CHECK(s.x[b] == doctest::Approx(-3));
  CHECK(s.x[a] == doctest::Approx(4));
  CHECK(s.objective == doctest::Approx(7 + 4 - 6));
  CHECK(lp::objective_value(p, s.x) == doctest::Approx(s.objective));
}

TEST_CASE("infeasible and unbounded") {
  lp::Problem p;
  const int x = p.add_variable("x", 1);
  p.add_row("lo", "t", {{x, 1}}, Sense::ge, 5);
  p.add_row("hi", "t", {{x, 1}}, Sense::le, 3);
  CHECK(lp::solve(p).status == lp::Status::infeasible);

  lp::Problem q;
  const int y = q.add_variable("y", -1);
  const int z = q.add_variable("z", 0);
  q.add_row("r", "t", {{y, 1}, {z, -1}}, Sense::le, 1);
  CHECK(lp::solve(q).status == lp::Status::unbounded);

  lp::Problem r;
  r.add_variable("w", 1, 2, 1);
  CHECK(lp::solve(r).status == lp::Status::infeasible);
}

TEST_CASE("degenerate problem terminates") {
  // Klee-Minty style cube with many ties at the origin.
  lp::Problem p;
  const int n = 6;
  for (int j = 0; j < n; ++j) p.add_variable("x" + std::to_string(j), -std::pow(2.0, n - 1 - j));
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < i; ++j) row.push_back({j, std::pow(2.0, i - j + 1)});
    row.push_back({i, 1});
    p.add_row("r" + std::to_string(i), "t", row, Sense::le, std::pow(5.0, i));
  }
  for (int i = 0; i < n; ++i) p.add_row("z" + std::to_string(i), "t", {{i, 1}, {(i + 1) % n, -1}}, Sense::le, 0);
  const auto s = lp::solve(p);
  const auto ref = oracle::enumerate_vertices(p);
  REQUIRE(ref.feasible);
  REQUIRE(s.status == lp::Status::optimal);
  CHECK(s.objective == doctest::Approx(ref.objective));
}

TEST_CASE("random problems agree with vertex enumeration") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 40; ++t) {
    lp::Problem p;
    const int n = 3 + t % 4;
    for (int j = 0; j < n; ++j) p.add_variable("v" + std::to_string(j), u(rng), -1, 1 + std::abs(u(rng)));
    for (int i = 0; i < 3; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) row.push_back({j, u(rng)});
      p.add_row("r" + std::to_string(i), "t", row, i == 2 ? Sense::ge : Sense::le, u(rng));
    }
    const auto s = lp::solve(p);
    const auto ref = oracle::enumerate_vertices(p);
    if (!ref.feasible) {
      CHECK(s.status == lp::Status::infeasible);
    } else {
      REQUIRE(s.status == lp::Status::optimal);
      CHECK(s.objective == doctest::Approx(ref.objective).epsilon(1e-7));
      CHECK(s.max_violation <= 1e-8);
    }
  }
}

TEST_CASE("LP text round trip") {
  lp::Problem p;
  const int x = p.add_variable("gen_a b_p_nom", 3.5, 0, 10);
  const int y = p.add_variable("free", -1, -lp::kInf, lp::kInf);
  const int z = p.add_variable("fixed", 0, 2, 2);
  p.add_row("cap", "capacity", {{x, 1}, {y, -2}}, Sense::le, 4);
  p.add_row("bal", "balance", {{x, 1}, {y, 1}, {z, 1}}, Sense::eq, 6);
  p.add_row("min", "link", {{y, 1}}, Sense::ge, -3);
  p.objective_constant = 12.25;
  const std::string text = lp::to_lp_text(p);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  const auto back = lp::from_lp_text(text);
  REQUIRE(back.variable_count() == 3);
  CHECK(back.rows.size() == 3);
  CHECK(back.objective_constant == 12.25);
  CHECK(lp::to_lp_text(back) == text);
  CHECK(lp::solve(back).objective == doctest::Approx(lp::solve(p).objective));
  CHECK_THROWS_AS(lp::from_lp_text("Minimize\n obj: x +\nSubject To\n c: x >=\nEnd\n"), Error);
}
