#pragma once

// Reference FOR areas of grids without a network between units and PCC.
// The reachable PCC exchange is the sum of the unit boxes; an optional
// apparent-power limit at the PCC cuts it with a disk. The area is counted
// on a fine lattice.

#include <cmath>

#include "fpr/grid_model.hpp"

namespace oracle {

struct BoxSum {
  double p_lo = 0.0, p_hi = 0.0, q_lo = 0.0, q_hi = 0.0;
};

/// Range of the import (negated injection sum).
inline BoxSum import_box(const fpr::grid::Network& net) {
  BoxSum b;
  for (const auto& u : net.units) {
    b.p_lo -= u.p_max_mw;
    b.p_hi -= u.p_min_mw;
    b.q_lo -= u.q_max_mvar;
    b.q_hi -= u.q_min_mvar;
  }
  return b;
}

inline double box_area(const BoxSum& b) { return (b.p_hi - b.p_lo) * (b.q_hi - b.q_lo); }

inline double box_disk_area(const BoxSum& b, double s_max, int cells = 2000) {
  const double dp = (b.p_hi - b.p_lo) / cells, dq = (b.q_hi - b.q_lo) / cells;
  long inside = 0;
  for (int i = 0; i < cells; ++i) {
    const double p = b.p_lo + (i + 0.5) * dp;
    for (int j = 0; j < cells; ++j) {
      const double q = b.q_lo + (j + 0.5) * dq;
      if (p * p + q * q <= s_max * s_max) ++inside;
    }
  }
  return inside * dp * dq;
}

}  // namespace oracle
