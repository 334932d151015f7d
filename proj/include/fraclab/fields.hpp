#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/linalg.hpp"
#include "fraclab/scene.hpp"

namespace fraclab {

enum class Smoothness { C2Near, Lipschitz, LscOnly };
std::string to_string(Smoothness s);

/// u restricted to the line x + tau*xi.
struct LineRestriction {
  double base = 0.0;                      ///< u(x)
  std::optional<IntervalList> indicator;  ///< set when u = 1 on these intervals and 0 elsewhere
  std::function<double(double)> eval;     ///< tau -> u(x + tau*xi)
  Smoothness smoothness = Smoothness::LscOnly;
};

/// A bounded (or globally Lipschitz) real function on R^N with the metadata the quadrature needs.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual int dim() const = 0;
  virtual double value(const Point& y) const = 0;
  /// sup |u|; +inf when only a Lipschitz bound is available.
  virtual double sup_bound() const = 0;
  /// Global Lipschitz constant, +inf when unknown.
  virtual double lipschitz() const { return std::numeric_limits<double>::infinity(); }
  virtual bool nonnegative() const { return false; }

  /// Radius of a ball around y on which u is C^2 (0 when y sits on a singularity).
  virtual double c2_radius(const Point& y) const = 0;
  Smoothness smoothness(const Point& y) const;

  virtual std::optional<Vector> gradient(const Point&) const { return std::nullopt; }
  virtual std::optional<Matrix> hessian(const Point&) const { return std::nullopt; }

  /// The open set U when u is exactly its indicator.
  virtual const CsgSet* indicator_set() const { return nullptr; }
  /// The open set {u > 0} when it is known exactly as a CSG set.
  virtual const CsgSet* positivity_set() const { return nullptr; }

  /// Far-field data along the line x + tau*xi:
  ///   u(x + tau*xi) = far_limit  for |tau| > line_support_end,
  ///   |u(x + tau*xi) - far_limit| <= far_deviation(R)  for |tau| >= R.
  virtual double far_limit(const Point&, const Vector&) const { return 0.0; }
  virtual double line_support_end(const Point&, const Vector&) const {
    return std::numeric_limits<double>::infinity();
  }
  virtual double far_deviation(const Point& x, const Vector& xi, double r) const;

  /// Parameters tau > 0 where u(x + tau*xi) or u(x - tau*xi) may fail to be smooth.
  virtual std::vector<double> line_breakpoints(const Point&, const Vector&) const { return {}; }

  virtual std::string describe() const = 0;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

FieldPtr indicator_field(CsgSet set);
/// dist(., R^N \ set). Throws UnboundedSet when no finite sup bound exists unless allow_unbounded,
/// in which case the field is only 1-Lipschitz.
FieldPtr distance_field(CsgSet set, bool allow_unbounded = false);
FieldPtr truncated_distance_field(CsgSet set);
/// exp(-|y - center|^2 / width^2).
FieldPtr gaussian_bump(Point center, double width);
/// exp(-(y - center)^T A (y - center)) for symmetric positive definite A.
FieldPtr anisotropic_bump(Point center, Matrix a);
/// (1 - y_axis^2)_+^s in R^n.
FieldPtr getoor_profile(double s, int n, int axis = 0);
FieldPtr constant_field(int n, double c);
/// (1 - |y - center|^2 / radius^2)_+^3, a C^2 bump with compact support.
FieldPtr poly_bump(Point center, double radius);
/// <slope, y - center> * exp(-|y - center|^2 / width^2); zero Hessian at the center.
FieldPtr tilted_bump(Point center, Vector slope, double width);
/// sum_i w_i u_i.
FieldPtr sum_field(std::vector<double> weights, std::vector<FieldPtr> fields);
/// y -> u(M y + t) with M invertible.
FieldPtr affine_pullback(FieldPtr u, Matrix m, Vector t);

/// The returned eval refers to u, which must outlive it.
LineRestriction restrict_to_line(const ScalarField& u, const Point& x, const UnitDirection& xi);

}  // namespace fraclab
