#pragma once

#include <span>
#include <vector>

namespace fpr::geometry {

/// A point in the active/reactive power plane.
struct Point {
  double p_mw = 0.0;
  double q_mvar = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Shoelace formula; positive for counterclockwise vertex order.
double signed_area(std::span<const Point> polygon);
double area(std::span<const Point> polygon);

/// True when `pt` lies inside or on the boundary (within `eps`).
bool contains(std::span<const Point> polygon, Point pt, double eps = 1e-12);

/// Closest point of the closed polygon region to `pt`; identity for interior points.
Point clip_to_polygon(std::span<const Point> polygon, Point pt);

/// No two non-adjacent edges intersect. Zero-length edges are tolerated.
bool is_simple(std::span<const Point> polygon);

struct Box {
  double p_min, p_max, q_min, q_max;
};
Box bounding_box(std::span<const Point> polygon);

}  // namespace fpr::geometry
