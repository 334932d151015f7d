#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fraclab/fields.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/quadrature.hpp"

namespace fraclab {

struct OptimizerConfig {
  int restarts = 6;
  int max_iters = 400;
  double initial_step = 0.5;  ///< radians; halved after each sweep without improvement
  std::uint64_t seed = 0;
  double tol = 1e-5;          ///< stop once the step drops below tol
  int sphere_points = 32;     ///< inner-sup starting points for dim V >= 2
  Execution exec = Execution::Parallel;
  void validate() const;
};

/// Per-direction objective for the generic searches.
using DirectionalFn = std::function<OperatorValue(const Vector&)>;

/// Multi-start Givens pattern search for min over k-frames of sum_i f(xi_i); the frame is attached.
OperatorValue minimize_frame_sum(const DirectionalFn& f, int n, int k, const OptimizerConfig& opt,
                                 const std::vector<Frame>& starts = {});
/// Outer search over k-subspaces of the inner sphere sup of f; the subspace is attached.
OperatorValue minimize_subspace_sup(const DirectionalFn& f, int n, int k, const OptimizerConfig& opt,
                                    const std::vector<Subspace>& starts = {});

/// sum_i I_{xi_i} u(x) over the frame; the bracket is the sum of the brackets.
OperatorValue frame_sum(const ScalarField& u, const Point& x, const Frame& f, double s, const QuadratureSpec& spec = {});

/// Best-found value of the truncated operator (an upper bound of the infimum) with its frame.
/// `starts` are tried before the identity and random restarts.
OperatorValue eval_truncated(const ScalarField& u, const Point& x, const FracParams& params,
                             const QuadratureSpec& spec = {}, const OptimizerConfig& opt = {},
                             const std::vector<Frame>& starts = {});

/// Lower bound of sup_{xi in V, |xi| = 1} I_xi u(x), with the best direction as a 1-frame.
OperatorValue subspace_sup(const ScalarField& u, const Point& x, const Subspace& v, double s,
                           const QuadratureSpec& spec = {}, const OptimizerConfig& opt = {});

/// Best-found value of the eigenvalue operator: outer inf over subspaces (upper bound) of the inner
/// sup lower bound. The returned value is the inner lower bound at the returned subspace.
OperatorValue eval_eigenvalue(const ScalarField& u, const Point& x, const FracParams& params,
                              const QuadratureSpec& spec = {}, const OptimizerConfig& opt = {},
                              const std::vector<Subspace>& starts = {});

enum class OperatorKind { Truncated, Eigenvalue };

/// Exhaustive angular grid (N <= 3) at the given resolution in degrees.
OperatorValue brute_force_oracle(const ScalarField& u, const Point& x, const FracParams& params,
                                 double resolution_deg, OperatorKind kind, const QuadratureSpec& spec = {},
                                 Execution exec = Execution::Parallel);

/// Central-difference Hessian H at x: (sum of the k smallest eigenvalues, k-th smallest eigenvalue).
/// h <= 0 selects 1e-4 (1 + |x|).
std::pair<double, double> local_limit_reference(const ScalarField& u, const Point& x, int k, double h = 0.0);

}  // namespace fraclab
