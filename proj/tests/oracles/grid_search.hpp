#pragma once

// Hierarchical grid search for min sum (y - (a x + b))^2 over a >= 0, b >= 0.
// Each level scans a 201 x 201 lattice and zooms onto the best cell, until
// the lattice step is ten times finer than `resolution` relative to the
// parameter magnitude.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct GridFit {
  double a = 0.0;
  double b = 0.0;
  double sse = 0.0;
  double step_a = 0.0;
  double step_b = 0.0;
};

inline double line_sse(const std::vector<double>& x, const std::vector<double>& y, double a, double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (a * x[i] + b);
    s += r * r;
  }
  return s;
}

inline GridFit grid_search_line(const std::vector<double>& x, const std::vector<double>& y,
                                double resolution = 1e-3) {
  // Cauchy-Schwarz bounds on the slope of either active face; x >= 0.
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0, sxx = 0, syy = 0, x2 = 0, y2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
    x2 += x[i] * x[i];
    y2 += y[i] * y[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  double a_ext = 1.0;
  if (sxx > 0) a_ext = std::max(a_ext, 1.0 + std::sqrt(syy / sxx));
  if (x2 > 0) a_ext = std::max(a_ext, 1.0 + std::sqrt(y2 / x2));
  const double y_max = std::max(0.0, *std::max_element(y.begin(), y.end()));
  const double b_ext = y_max + 1.0;
  double a_lo = 0.0, a_hi = a_ext, b_lo = 0.0, b_hi = b_ext;
  const int steps = 200;
  GridFit best;
  best.sse = line_sse(x, y, 0.0, 0.0);
  while (true) {
    const double da = (a_hi - a_lo) / steps, db = (b_hi - b_lo) / steps;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j <= steps; ++j) {
        const double a = a_lo + i * da, b = b_lo + j * db;
        const double s = line_sse(x, y, a, b);
        if (s < best.sse) best = {a, b, s, da, db};
      }
    }
    best.step_a = da;
    best.step_b = db;
    if (da <= 0.1 * resolution * std::max(1.0, best.a) && db <= 0.1 * resolution * std::max(1.0, best.b)) break;
    // Wide window: the lattice minimum of an elongated valley can sit many
    // cells away from the continuous one.
    a_lo = std::max(0.0, best.a - 20 * da);
    a_hi = best.a + 20 * da;
    b_lo = std::max(0.0, best.b - 20 * db);
    b_hi = best.b + 20 * db;
  }
  return best;
}

}  // namespace oracle
