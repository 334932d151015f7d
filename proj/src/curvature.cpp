#include "fraclab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr double kBoundaryTol = 1e-8;
constexpr double kGradientTol = 1e-8;
constexpr double kCurvatureTol = 1e-8;

}  // namespace

ImplicitSurfacePatch paraboloid_patch(const Point& apex, double curvature) {
  const int n = static_cast<int>(apex.size());
  ImplicitSurfacePatch p;
  p.dim = n;
  p.phi = [=](const Point& y) {
    const Vector d = y - apex;
    return d[n - 1] - 0.5 * curvature * d.head(n - 1).squaredNorm();
  };
  p.gradient = [=](const Point& y) {
    Vector g = -curvature * (y - apex);
    g[n - 1] = 1.0;
    return g;
  };
  p.hessian = [=](const Point&) {
    Matrix h = -curvature * Matrix::Identity(n, n);
    h(n - 1, n - 1) = 0.0;
    return h;
  };
  return p;
}

ImplicitSurfacePatch set_patch(const CsgSet& set) {
  ImplicitSurfacePatch p;
  p.dim = set.dim();
  p.phi = [set](const Point& y) {
    return contains(set, y) ? depth_lower_bound(set, y) : -exterior_distance_lower_bound(set, y);
  };
  return p;
}

Vector patch_gradient(const ImplicitSurfacePatch& patch, const Point& x) {
  if (patch.gradient) return patch.gradient(x);
  const double h = patch.fd_step;
  Vector g(patch.dim);
  for (int i = 0; i < patch.dim; ++i) {
    const Vector e = h * Vector::Unit(patch.dim, i);
    g[i] = (patch.phi(x + e) - patch.phi(x - e)) / (2.0 * h);
  }
  return g;
}

Matrix patch_hessian(const ImplicitSurfacePatch& patch, const Point& x) {
  if (patch.hessian) return patch.hessian(x);
  const double h = patch.fd_step;
  const int n = patch.dim;
  Matrix m(n, n);
  const double f0 = patch.phi(x);
  for (int i = 0; i < n; ++i) {
    const Vector ei = h * Vector::Unit(n, i);
    m(i, i) = (patch.phi(x + ei) - 2.0 * f0 + patch.phi(x - ei)) / (h * h);
    for (int j = 0; j < i; ++j) {
      const Vector ej = h * Vector::Unit(n, j);
      m(i, j) = m(j, i) = (patch.phi(x + ei + ej) - patch.phi(x + ei - ej) - patch.phi(x - ei + ej) +
                           patch.phi(x - ei - ej)) / (4.0 * h * h);
    }
  }
  return m;
}

std::vector<double> principal_curvatures(const ImplicitSurfacePatch& patch, const Point& x) {
  if (x.size() != patch.dim) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from patch");
  if (patch.dim < 2) throw Error(ErrorKind::InvalidDimension, "curvatures need N >= 2");
  if (std::abs(patch.phi(x)) > kBoundaryTol) throw Error(ErrorKind::NotOnBoundary, "|phi(x)| exceeds 1e-8");
  const Vector g = patch_gradient(patch, x);
  const double gn = g.norm();
  if (gn < kGradientTol) throw Error(ErrorKind::DegenerateGradient, "|grad phi(x)| below 1e-8");
  // Tangent basis of the level set; the graph Hessian of f is -T^T D^2 phi T / |grad phi|.
  const Matrix t = complement_basis(Matrix(g / gn));
  const Matrix k = -(t.transpose() * patch_hessian(patch, x) * t) / gn;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.transpose()));
  const Vector ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

PredicateVerdict check_curvature(const ImplicitSurfacePatch& patch, const Point& x, int k, CurvatureMode mode) {
  const std::vector<double> kappa = principal_curvatures(patch, x);
  const int m = static_cast<int>(kappa.size());
  if (k < 1 || k > m) throw Error(ErrorKind::InvalidDimension, "k must lie in [1, N-1]");
  double q = 0.0;
  if (mode == CurvatureMode::SumTopK) {
    for (int i = 0; i < k; ++i) q += kappa[static_cast<std::size_t>(m - 1 - i)];
  } else {
    q = kappa[static_cast<std::size_t>(m - k)];
  }
  PredicateVerdict v;
  v.status = q >= -kCurvatureTol ? VerdictStatus::Holds : VerdictStatus::Fails;
  if (v.status == VerdictStatus::Fails) v.certificate = x;
  std::ostringstream os;
  os.precision(10);
  os << (mode == CurvatureMode::SumTopK ? "sum of top k curvatures " : "kappa_{N-k} ") << q << "; kappa =";
  for (double c : kappa) os << ' ' << c;
  v.detail = os.str();
  return v;
}

Point project_to_boundary(const ImplicitSurfacePatch& patch, const Point& p, int steps) {
  Point y = p;
  for (int i = 0; i < steps; ++i) {
    const Vector g = patch_gradient(patch, y);
    const double g2 = g.squaredNorm();
    if (g2 < kGradientTol * kGradientTol) throw Error(ErrorKind::DegenerateGradient, "vanishing gradient");
    y -= patch.phi(y) / g2 * g;
  }
  return y;
}

}  // namespace fraclab
