#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraclab/fields.hpp"
#include "fraclab/linalg.hpp"

namespace fraclab {

inline constexpr double kMinS = 1e-3;
inline constexpr double kMaxS = 1.0 - 1e-3;

struct FracParams {
  double s = 0.5;
  int k = 1;
  int n = 1;
  /// Throws OutOfRange for s outside [1e-3, 1 - 1e-3], InvalidDimension for k outside [1, n].
  void validate() const;
};

struct QuadratureSpec {
  double split_radius = 0.5;
  int inner_nodes = 48;
  double outer_tol = 1e-11;
  double tail_tol = 1e-9;
  /// Hard cap on the truncation radius.
  double max_radius = 1e12;
  void validate() const;
};

/// Value with a bracket lo <= value <= hi and, for the operators, the best frame or subspace.
struct OperatorValue {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<Frame> frame;
  std::optional<Subspace> subspace;
  double radius = 0.0;  ///< truncation radius used
  std::string note;

  double width() const { return hi - lo; }
};

OperatorValue operator+(const OperatorValue& a, const OperatorValue& b);

/// Nodes and weights for int_{-1}^{1} f(t) (1-t)^alpha (1+t)^beta dt.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_jacobi(int n, double alpha, double beta);

/// C_s = 4^s s Gamma(1/2 + s) / (sqrt(pi) Gamma(1 - s)).
double normalization_constant(double s);

/// Smallest R with C_s (2 sup + 2|base|) R^{-2s} / (2s) <= tail_tol.
double tail_radius(double sup_bound, double base_value, double s, double tail_tol);

/// C_s int_0^inf (u(x+t xi) + u(x-t xi) - 2u(x)) t^{-1-2s} dt with a bracket covering
/// inner-rule, outer-quadrature and tail errors.
OperatorValue eval_directional(const ScalarField& u, const Point& x, const UnitDirection& xi, double s,
                               const QuadratureSpec& spec = {});

/// C_s int_eps^inf (u(x+t xi) + u(x-t xi)) t^{-1-2s} dt for u >= 0 with u(x) = 0.
OperatorValue eval_directional_punctured(const ScalarField& u, const Point& x, const UnitDirection& xi, double s,
                                         double eps, const QuadratureSpec& spec = {});

/// C_s int_eps^inf (u(x+t xi) + u(x-t xi) - 2u(x)) t^{-1-2s} dt, no sign requirement.
OperatorValue eval_directional_from(const ScalarField& u, const Point& x, const UnitDirection& xi, double s,
                                    double eps, const QuadratureSpec& spec = {});

}  // namespace fraclab
