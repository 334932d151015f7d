#pragma once

#include <string>
#include <vector>

#include "fraclab/curvature.hpp"
#include "fraclab/fields.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/scene.hpp"

namespace fraclab {

struct FieldSpec {
  /// indicator | distance | truncated_distance | gaussian | anisotropic | getoor | constant
  std::string type = "indicator";
  std::optional<Point> center;
  double width = 1.0;
  std::optional<Matrix> matrix;
  double value = 0.0;
  int axis = 0;
};

struct Scene {
  std::string name;  ///< fixture name or "custom"
  int dimension = 1;
  CsgSet set = CsgSet::nothing(1);
  CsgSet omega = CsgSet::everything(1);
  FieldSpec field;
  FracParams params;
  QuadratureSpec quadrature;
  OptimizerConfig optimizer;

  /// Validates dimensions and ranges; throws ValidationError naming the invariant.
  void validate() const;
  FieldPtr make_field() const;
  /// Analytic patch for a single paraboloid, otherwise the CSG level function.
  ImplicitSurfacePatch make_patch() const;
};

std::vector<std::string> fixture_names();
/// "two-balls-r3", "annulus-shell", "unit-ball", "paraboloid" or "getoor".
Scene fixture_scene(const std::string& name);

/// Parses a JSON scene document; ParseError carries line:column, ValidationError the JSON path.
Scene parse_scene_text(const std::string& text);
Scene parse_scene(const std::string& path);

std::string scene_to_json(const Scene& scene);

}  // namespace fraclab
