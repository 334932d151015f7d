#pragma once

#include <functional>
#include <optional>

#include "fraclab/scene.hpp"

namespace fraclab {

/// Level function phi with phi > 0 inside U near the boundary patch {phi = 0}.
struct ImplicitSurfacePatch {
  int dim = 0;
  std::function<double(const Point&)> phi;
  std::function<Vector(const Point&)> gradient;  ///< empty: central differences
  std::function<Matrix(const Point&)> hessian;   ///< empty: central differences
  double fd_step = 1e-4;
};

/// Analytic patch of Paraboloid(apex, curvature): phi = y_N - apex_N - c/2 |y' - apex'|^2.
ImplicitSurfacePatch paraboloid_patch(const Point& apex, double curvature);
/// Patch of a CSG set: phi = depth inside, minus the exterior distance bound outside.
/// Derivatives by central differences.
ImplicitSurfacePatch set_patch(const CsgSet& set);

Vector patch_gradient(const ImplicitSurfacePatch& patch, const Point& x);
Matrix patch_hessian(const ImplicitSurfacePatch& patch, const Point& x);

/// Principal curvatures in ascending order, with U = {x_N > f(x')} giving the eigenvalues of D^2 f.
std::vector<double> principal_curvatures(const ImplicitSurfacePatch& patch, const Point& x);

enum class CurvatureMode { SumTopK, Single };

/// SumTopK: sum of the k largest curvatures >= -1e-8. Single: kappa_{N-k} >= -1e-8.
PredicateVerdict check_curvature(const ImplicitSurfacePatch& patch, const Point& x, int k, CurvatureMode mode);

/// Five Newton steps along the gradient towards {phi = 0}.
Point project_to_boundary(const ImplicitSurfacePatch& patch, const Point& p, int steps = 5);

}  // namespace fraclab
