#pragma once

#include "fraclab/operators.hpp"
#include "fraclab/scene.hpp"

namespace fraclab {

struct PredicateSearch {
  double resolution_deg = 2.0;  ///< angular grid spacing for N <= 3
  int refine_levels = 2;        ///< 2x2 subdivisions of a grid cell that resists refutation
  OptimizerConfig opt{};        ///< penalty-minimization restarts
};

/// Condition G at x: an orthonormal k-frame whose full lines through x avoid U.
/// Holds carries a frame that re-verifies through line_avoids; Fails is claimed only for N <= 3
/// when every grid cell of frames is certified to meet U; Inconclusive otherwise.
PredicateVerdict check_G(const CsgSet& u, const CsgSet& omega, int k, const Point& x,
                         const PredicateSearch& search = {});

/// Affine condition at x: a k-dimensional V with (x + V) n U empty. Fails carries a point of U
/// (on the tangent plane when x lies on a ball boundary and k = N - 1).
PredicateVerdict check_G_affine(const CsgSet& u, int k, const Point& x, const PredicateSearch& search = {});

/// Exact re-verification of witnesses.
bool frame_avoids(const CsgSet& u, const Point& x, const Frame& f);

/// Convexity of every grid component of U in the box.
PredicateVerdict check_convex_components(const CsgSet& u, const AxisBox& box, double h, int m);

}  // namespace fraclab
