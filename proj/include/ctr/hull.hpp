#pragma once

#include <utility>
#include <vector>

#include "ctr/types.hpp"

namespace ctr {

struct HullResult {
  std::vector<std::pair<VectorXd, double>> halfspaces;  // a.x + b <= 0
  double radius = 0.0;                                  // max inscribed sphere about origin
  bool degenerate = false;
};

// H-representation of the convex hull of a point cloud (dim 2 via monotone
// chain, dim 3 via incremental insertion) followed by the Chebyshev radius
// about the origin. Flat clouds come back flagged degenerate with radius 0.
HullResult hull_and_radius(const std::vector<VectorXd>& points, int dim);

}  // namespace ctr
