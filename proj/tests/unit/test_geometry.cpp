#include <doctest.h>

#include <vector>

#include "fpr/geometry.hpp"

using fpr::geometry::Point;
namespace g = fpr::geometry;

namespace {
const std::vector<Point> kSquare{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
}

TEST_CASE("shoelace area is signed by orientation") {
  CHECK(g::signed_area(kSquare) == doctest::Approx(4.0));
  std::vector<Point> cw(kSquare.rbegin(), kSquare.rend());
  CHECK(g::signed_area(cw) == doctest::Approx(-4.0));
  CHECK(g::area(cw) == doctest::Approx(4.0));
  CHECK(g::area(std::vector<Point>{}) == 0.0);
  CHECK(g::area(std::vector<Point>{{1, 1}, {2, 2}}) == 0.0);
}

TEST_CASE("containment includes the boundary") {
  CHECK(g::contains(kSquare, {1, 1}));
  CHECK(g::contains(kSquare, {0, 1}));
  CHECK(g::contains(kSquare, {2, 2}));
  CHECK_FALSE(g::contains(kSquare, {2.1, 1}));
  CHECK_FALSE(g::contains(kSquare, {-1e-6, 1}));
  CHECK(g::contains(kSquare, {-1e-6, 1}, 1e-5));
}

TEST_CASE("clipping projects onto the nearest boundary point") {
  const Point inside{0.5, 1.5};
  CHECK(g::clip_to_polygon(kSquare, inside) == inside);
  const Point c = g::clip_to_polygon(kSquare, {3, 1});
  CHECK(c.p_mw == doctest::Approx(2));
  CHECK(c.q_mvar == doctest::Approx(1));
  const Point corner = g::clip_to_polygon(kSquare, {-1, -1});
  CHECK(corner.p_mw == doctest::Approx(0));
  CHECK(corner.q_mvar == doctest::Approx(0));
}

TEST_CASE("simplicity check rejects a bow tie") {
  CHECK(g::is_simple(kSquare));
  CHECK_FALSE(g::is_simple(std::vector<Point>{{0, 0}, {2, 2}, {2, 0}, {0, 2}}));
  CHECK(g::is_simple(std::vector<Point>{{0, 0}, {1, 0}, {1, 0}, {1, 1}}));
}

TEST_CASE("bounding box") {
  const auto b = g::bounding_box(std::vector<Point>{{-1, 3}, {2, -4}, {0, 0}});
  CHECK(b.p_min == -1);
  CHECK(b.p_max == 2);
  CHECK(b.q_min == -4);
  CHECK(b.q_max == 3);
}
