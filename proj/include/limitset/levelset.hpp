#pragma once

#include <vector>

#include "limitset/gauge.hpp"

namespace limitset {

// Discretization of the unit level set {g = 1} and of the set {g <= 1}
// (boundary plus a radial interior fill; the set is star-shaped, so scaled
// copies of the boundary cover it).
struct LevelSetMesh {
  int dim = 0;
  std::vector<double> boundary;    // flattened boundary vertices
  std::vector<double> set_points;  // boundary + interior fill + origin

  std::size_t boundary_count() const { return boundary.size() / dim; }
  std::size_t set_count() const { return set_points.size() / dim; }
};

// d = 2: n points over the quarter circle of directions; d = 3: n x n
// spherical grid. Directions where g is infinite contribute nothing.
LevelSetMesh level_set_mesh(const GaugeSpec& g, int n = 0, int radial_layers = 20);

// Limit set of the negative-correlation meta-Gaussian pair: the closed
// region from the positive-quadrant branch plus unit segments along both
// axes. Experimental; the gauge of this set is discontinuous.
LevelSetMesh neg_corr_gaussian_mesh(double rho, int n = 400, int radial_layers = 20);

// Polyline of directions scaled to the first touching radius of the corner
// region (the curve traced by the angular dependence exponent), for overlay
// plots next to the unit level set. Bivariate only.
std::vector<double> lambda_overlay_polyline(const GaugeSpec& g, int n = 181);

}  // namespace limitset
