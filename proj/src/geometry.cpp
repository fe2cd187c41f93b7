#include "fpr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpr::geometry {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.p_mw - o.p_mw) * (b.q_mvar - o.q_mvar) - (a.q_mvar - o.q_mvar) * (b.p_mw - o.p_mw);
}

Point closest_on_segment(Point a, Point b, Point pt) {
  const double dx = b.p_mw - a.p_mw;
  const double dy = b.q_mvar - a.q_mvar;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return a;
  double t = ((pt.p_mw - a.p_mw) * dx + (pt.q_mvar - a.q_mvar) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return {a.p_mw + t * dx, a.q_mvar + t * dy};
}

double dist2(Point a, Point b) {
  const double dx = a.p_mw - b.p_mw;
  const double dy = a.q_mvar - b.q_mvar;
  return dx * dx + dy * dy;
}

bool on_segment(Point a, Point b, Point c) {
  return std::min(a.p_mw, b.p_mw) <= c.p_mw && c.p_mw <= std::max(a.p_mw, b.p_mw) &&
         std::min(a.q_mvar, b.q_mvar) <= c.q_mvar && c.q_mvar <= std::max(a.q_mvar, b.q_mvar);
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

}  // namespace

double signed_area(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % n];
    twice += a.p_mw * b.q_mvar - b.p_mw * a.q_mvar;
  }
  return 0.5 * twice;
}

double area(std::span<const Point> polygon) { return std::abs(signed_area(polygon)); }

bool contains(std::span<const Point> polygon, Point pt, double eps) {
  const std::size_t n = polygon.size();
  if (n == 0) return false;
  if (n == 1) return dist2(polygon[0], pt) <= eps * eps;
  for (std::size_t i = 0; i < n; ++i) {
    const Point c = closest_on_segment(polygon[i], polygon[(i + 1) % n], pt);
    if (dist2(c, pt) <= eps * eps) return true;
  }
  // even-odd ray casting
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = polygon[i];
    const Point& b = polygon[j];
    if ((a.q_mvar > pt.q_mvar) != (b.q_mvar > pt.q_mvar)) {
      const double p_cross =
          a.p_mw + (pt.q_mvar - a.q_mvar) * (b.p_mw - a.p_mw) / (b.q_mvar - a.q_mvar);
      if (pt.p_mw < p_cross) inside = !inside;
    }
  }
  return inside;
}

Point clip_to_polygon(std::span<const Point> polygon, Point pt) {
  if (polygon.empty()) return pt;
  if (contains(polygon, pt)) return pt;
  Point best = polygon[0];
  double best_d = std::numeric_limits<double>::infinity();
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point c = closest_on_segment(polygon[i], polygon[(i + 1) % n], pt);
    const double d = dist2(c, pt);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

bool is_simple(std::span<const Point> input) {
  std::vector<Point> polygon;
  for (const Point& pt : input) {
    if (polygon.empty() || !(polygon.back() == pt)) polygon.push_back(pt);
  }
  while (polygon.size() > 1 && polygon.front() == polygon.back()) polygon.pop_back();
  const std::size_t n = polygon.size();
  if (n < 4) return true;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // shares vertex 0
      if (segments_intersect(a, b, polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

Box bounding_box(std::span<const Point> polygon) {
  Box box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point& pt : polygon) {
    box.p_min = std::min(box.p_min, pt.p_mw);
    box.p_max = std::max(box.p_max, pt.p_mw);
    box.q_min = std::min(box.q_min, pt.q_mvar);
    box.q_max = std::max(box.q_max, pt.q_mvar);
  }
  return box;
}

}  // namespace fpr::geometry
