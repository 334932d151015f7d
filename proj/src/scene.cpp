#include "fraclab/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorKind::ValidationError, std::string(what) + " must be finite");
}

void require_dim(const CsgSet& set, Eigen::Index n) {
  if (set.dim() != n) throw Error(ErrorKind::DimensionMismatch, "set and point dimensions differ");
}

// {tau : beta*tau + gamma < 0} or, with negative_side false, {... > 0}.
IntervalList linear_set(double beta, double gamma, bool negative_side) {
  if (!negative_side) {
    beta = -beta;
    gamma = -gamma;
  }
  if (beta == 0.0) return gamma < 0.0 ? IntervalList::whole_line() : IntervalList{};
  const double t0 = -gamma / beta;
  return beta > 0.0 ? IntervalList::single(-kInf, t0) : IntervalList::single(t0, kInf);
}

// {tau : a*tau^2 + 2b*tau + c < 0} (or > 0) for a >= 0.
IntervalList quadratic_set(double a, double b, double c, bool negative_side) {
  if (a == 0.0) return linear_set(2.0 * b, c, negative_side);
  const double disc = b * b - a * c;
  if (disc < 0.0) return negative_side ? IntervalList{} : IntervalList::whole_line();
  if (disc == 0.0) {
    const double r = -b / a;
    return negative_side ? IntervalList{} : IntervalList::from({{-kInf, r}, {r, kInf}});
  }
  const double sq = std::sqrt(disc);
  const double q = -(b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  return negative_side ? IntervalList::single(r1, r2) : IntervalList::from({{-kInf, r1}, {r2, kInf}});
}

Vector perp(const Vector& v, const Vector& unit_axis) { return v - v.dot(unit_axis) * unit_axis; }

// Sign function of a primitive: negative exactly on the open primitive.
double leaf_sign(const CsgSet::Node::Kind& kind, const Point& y) {
  return std::visit(
      overloaded{
          [&](const Ball& b) { return (y - b.center).squaredNorm() - b.radius * b.radius; },
          [&](const Box& b) {
            double w = -kInf;
            for (Eigen::Index i = 0; i < y.size(); ++i) w = std::max({w, b.lo[i] - y[i], y[i] - b.hi[i]});
            return w;
          },
          [&](const HalfSpace& h) { return h.normal.dot(y) - h.offset; },
          [&](const Cylinder& c) { return perp(y - c.point, c.axis).squaredNorm() - c.radius * c.radius; },
          [&](const Paraboloid& p) {
            const Eigen::Index n = y.size();
            const double r2 = (y.head(n - 1) - p.apex.head(n - 1)).squaredNorm();
            return p.apex[n - 1] + 0.5 * p.curvature * r2 - y[n - 1];
          },
          [&](const auto&) { return 0.0; },
      },
      kind);
}

bool contains_rec(const CsgSet::Node& node, bool neg, const Point& y) {
  using N = CsgSet::Node;
  return std::visit(
      overloaded{
          [&](const N::Union& u) {
            if (neg) return std::all_of(u.children.begin(), u.children.end(),
                                        [&](const CsgSet& c) { return contains_rec(c.node(), neg, y); });
            return std::any_of(u.children.begin(), u.children.end(),
                               [&](const CsgSet& c) { return contains_rec(c.node(), neg, y); });
          },
          [&](const N::Intersection& u) {
            if (neg) return std::any_of(u.children.begin(), u.children.end(),
                                        [&](const CsgSet& c) { return contains_rec(c.node(), neg, y); });
            return std::all_of(u.children.begin(), u.children.end(),
                               [&](const CsgSet& c) { return contains_rec(c.node(), neg, y); });
          },
          [&](const N::Complement& c) { return contains_rec(c.child.node(), !neg, y); },
          [&](const N::Everything&) { return !neg; },
          [&](const N::Nothing&) { return neg; },
          [&](const auto&) {
            const double f = leaf_sign(node.kind, y);
            return neg ? f > 0.0 : f < 0.0;
          },
      },
      node.kind);
}

IntervalList leaf_line_set(const CsgSet::Node::Kind& kind, bool neg, const Point& x, const Vector& xi) {
  const bool inside = !neg;
  return std::visit(
      overloaded{
          [&](const Ball& b) {
            const Vector d = x - b.center;
            return quadratic_set(xi.squaredNorm(), xi.dot(d), d.squaredNorm() - b.radius * b.radius, inside);
          },
          [&](const Cylinder& c) {
            const Vector xp = perp(xi, c.axis);
            const Vector dp = perp(x - c.point, c.axis);
            return quadratic_set(xp.squaredNorm(), xp.dot(dp), dp.squaredNorm() - c.radius * c.radius, inside);
          },
          [&](const HalfSpace& h) { return linear_set(h.normal.dot(xi), h.normal.dot(x) - h.offset, inside); },
          [&](const Box& b) {
            IntervalList acc = inside ? IntervalList::whole_line() : IntervalList{};
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              const IntervalList upper = linear_set(xi[i], x[i] - b.hi[i], inside);
              const IntervalList lower = linear_set(-xi[i], b.lo[i] - x[i], inside);
              acc = inside ? acc.intersect(upper).intersect(lower) : acc.unite(upper).unite(lower);
            }
            return acc;
          },
          [&](const Paraboloid& p) {
            const Eigen::Index n = x.size();
            const Vector dh = x.head(n - 1) - p.apex.head(n - 1);
            const Vector xh = xi.head(n - 1);
            const double a = 0.5 * p.curvature * xh.squaredNorm();
            const double b = -0.5 * (xi[n - 1] - p.curvature * dh.dot(xh));
            const double c = -(x[n - 1] - p.apex[n - 1]) + 0.5 * p.curvature * dh.squaredNorm();
            return quadratic_set(a, b, c, inside);
          },
          [&](const auto&) { return IntervalList{}; },
      },
      kind);
}

IntervalList line_rec(const CsgSet::Node& node, bool neg, const Point& x, const Vector& xi) {
  using N = CsgSet::Node;
  auto fold = [&](const std::vector<CsgSet>& children, bool as_union) {
    IntervalList acc = as_union ? IntervalList{} : IntervalList::whole_line();
    for (const auto& c : children) {
      const IntervalList part = line_rec(c.node(), neg, x, xi);
      acc = as_union ? acc.unite(part) : acc.intersect(part);
    }
    return acc;
  };
  return std::visit(overloaded{
                        [&](const N::Union& u) { return fold(u.children, !neg); },
                        [&](const N::Intersection& u) { return fold(u.children, neg); },
                        [&](const N::Complement& c) { return line_rec(c.child.node(), !neg, x, xi); },
                        [&](const N::Everything&) { return neg ? IntervalList{} : IntervalList::whole_line(); },
                        [&](const N::Nothing&) { return neg ? IntervalList::whole_line() : IntervalList{}; },
                        [&](const auto&) { return leaf_line_set(node.kind, neg, x, xi); },
                    },
                    node.kind);
}

// ----- distances ------------------------------------------------------------

struct DistInfo {
  double d;       // lower bound of the distance to the complement of the (effective) set
  double radius;  // C^2 radius of the recursion value around y
  Point nearest;  // boundary point of the active primitive
};

// Real roots of r^3 + p r + q = 0.
std::vector<double> depressed_cubic_roots(double p, double q) {
  std::vector<double> roots;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    if (m == 0.0) {
      roots.push_back(0.0);
    } else {
      const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
      const double theta = std::acos(arg) / 3.0;
      for (int j = 0; j < 3; ++j) roots.push_back(m * std::cos(theta - 2.0 * M_PI * j / 3.0));
    }
  }
  return roots;
}

// Unsigned distance and foot point from y to the paraboloid surface.
std::pair<double, Point> paraboloid_foot(const Paraboloid& p, const Point& y) {
  const Eigen::Index n = y.size();
  const Vector dh = y.head(n - 1) - p.apex.head(n - 1);
  const double rho = dh.norm();
  const double z = y[n - 1] - p.apex[n - 1];
  const double c = p.curvature;
  Vector radial = Vector::Zero(n - 1);
  if (rho > 0) {
    radial = dh / rho;
  } else if (n > 1) {
    radial[0] = 1.0;
  }
  // Stationary radii solve c^2/2 r^3 + (1 - c z) r - rho = 0.
  std::vector<double> candidates = depressed_cubic_roots(2.0 * (1.0 - c * z) / (c * c), -2.0 * rho / (c * c));
  candidates.push_back(0.0);
  double best = kInf;
  double best_r = 0.0;
  for (double r : candidates) {
    if (!(r >= 0.0)) continue;
    // One Newton polish on the stationarity condition.
    const double g = 0.5 * c * c * r * r * r + (1.0 - c * z) * r - rho;
    const double dg = 1.5 * c * c * r * r + (1.0 - c * z);
    if (dg != 0.0 && r > 0.0) r = std::max(0.0, r - g / dg);
    const double dz = 0.5 * c * r * r - z;
    const double dist2 = (r - rho) * (r - rho) + dz * dz;
    if (dist2 < best) {
      best = dist2;
      best_r = r;
    }
  }
  Point foot(n);
  foot.head(n - 1) = p.apex.head(n - 1) + best_r * radial;
  foot[n - 1] = p.apex[n - 1] + 0.5 * c * best_r * best_r;
  return {std::sqrt(best), foot};
}

DistInfo leaf_distance(const CsgSet::Node::Kind& kind, bool neg, const Point& y) {
  const Eigen::Index n = y.size();
  return std::visit(
      overloaded{
          [&](const Ball& b) -> DistInfo {
            const Vector d = y - b.center;
            const double r = d.norm();
            Vector u = Vector::Zero(n);
            if (r > 0) u = d / r; else u[0] = 1.0;
            const Point foot = b.center + b.radius * u;
            if (!neg) return {std::max(0.0, b.radius - r), r, foot};
            return {std::max(0.0, r - b.radius), kInf, foot};
          },
          [&](const Cylinder& c) -> DistInfo {
            const Vector dp = perp(y - c.point, c.axis);
            const double rho = dp.norm();
            Vector u = Vector::Zero(n);
            if (rho > 0) {
              u = dp / rho;
            } else {
              u = perp(Vector::Unit(n, c.axis.cwiseAbs().minCoeff() == std::abs(c.axis[0]) ? 0 : 1), c.axis);
              u.normalize();
            }
            const Point foot = y + (c.radius - rho) * u;
            if (!neg) return {std::max(0.0, c.radius - rho), rho, foot};
            return {std::max(0.0, rho - c.radius), kInf, foot};
          },
          [&](const HalfSpace& h) -> DistInfo {
            const double s = h.offset - h.normal.dot(y);
            const Point foot = y + s * h.normal;
            return {std::max(0.0, neg ? -s : s), kInf, foot};
          },
          [&](const Box& b) -> DistInfo {
            if (!neg) {
              double best = kInf, second = kInf;
              Eigen::Index axis = 0;
              bool upper = false;
              for (Eigen::Index i = 0; i < n; ++i) {
                for (int side = 0; side < 2; ++side) {
                  const double v = side == 0 ? y[i] - b.lo[i] : b.hi[i] - y[i];
                  if (v < best) {
                    second = best;
                    best = v;
                    axis = i;
                    upper = side == 1;
                  } else if (v < second) {
                    second = v;
                  }
                }
              }
              Point foot = y;
              foot[axis] = upper ? b.hi[axis] : b.lo[axis];
              return {std::max(0.0, best), 0.5 * (second - best), foot};
            }
            Point foot = y.cwiseMax(b.lo).cwiseMin(b.hi);
            double radius = kInf;
            for (Eigen::Index i = 0; i < n; ++i)
              radius = std::min({radius, std::abs(y[i] - b.lo[i]), std::abs(y[i] - b.hi[i])});
            return {(y - foot).norm(), radius, foot};
          },
          [&](const Paraboloid& p) -> DistInfo {
            auto [dist, foot] = paraboloid_foot(p, y);
            const bool inside = leaf_sign(p, y) < 0.0;
            if (neg) return {inside ? 0.0 : dist, kInf, foot};
            if (!inside) return {0.0, kInf, foot};
            // Medial axis of the epigraph: the symmetry axis above the apex curvature centre.
            Point tip = p.apex;
            tip[n - 1] += 1.0 / p.curvature;
            const double rho = (y.head(n - 1) - p.apex.head(n - 1)).norm();
            const double radius = y[n - 1] > tip[n - 1] ? rho : (y - tip).norm();
            return {dist, radius, foot};
          },
          [&](const auto&) -> DistInfo { return {0.0, kInf, y}; },
      },
      kind);
}

DistInfo dist_rec(const CsgSet::Node& node, bool neg, const Point& y) {
  using N = CsgSet::Node;
  auto fold = [&](const std::vector<CsgSet>& children, bool take_max) {
    DistInfo best{take_max ? -kInf : kInf, kInf, y};
    double second = take_max ? -kInf : kInf;
    for (const auto& c : children) {
      DistInfo info = dist_rec(c.node(), neg, y);
      const bool better = take_max ? info.d > best.d : info.d < best.d;
      if (better) {
        second = best.d;
        best = std::move(info);
      } else if (take_max ? info.d > second : info.d < second) {
        second = info.d;
      }
    }
    if (std::isfinite(second) && std::isfinite(best.d))
      best.radius = std::min(best.radius, 0.5 * std::abs(best.d - second));
    return best;
  };
  return std::visit(overloaded{
                        [&](const N::Union& u) { return fold(u.children, !neg); },
                        [&](const N::Intersection& u) { return fold(u.children, neg); },
                        [&](const N::Complement& c) { return dist_rec(c.child.node(), !neg, y); },
                        [&](const N::Everything&) { return DistInfo{neg ? 0.0 : kInf, kInf, y}; },
                        [&](const N::Nothing&) { return DistInfo{neg ? kInf : 0.0, kInf, y}; },
                        [&](const auto&) { return leaf_distance(node.kind, neg, y); },
                    },
                    node.kind);
}

// Exit time of the ray x + t*dir (t > 0) from the open set, x inside.
double exit_time(const CsgSet& set, const Point& x, const Vector& dir) {
  const IntervalList iv = line_intersection_intervals(set, x, dir);
  for (const auto& piece : iv.pieces())
    if (piece.lo < 0.0 && piece.hi > 0.0) return piece.hi;
  return 0.0;
}

// ----- extents ------------------------------------------------------------------

// Axis-aligned box containing the (effective) set; entries may be infinite, lo > hi marks empty.
AxisBox whole_box(int n) { return {Vector::Constant(n, -kInf), Vector::Constant(n, kInf)}; }
AxisBox empty_box(int n) { return {Vector::Constant(n, kInf), Vector::Constant(n, -kInf)}; }
bool box_empty(const AxisBox& b) { return (b.lo.array() > b.hi.array()).any(); }

AxisBox box_hull(const AxisBox& a, const AxisBox& b) {
  if (box_empty(a)) return b;
  if (box_empty(b)) return a;
  return {a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)};
}

AxisBox box_meet(const AxisBox& a, const AxisBox& b) { return {a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)}; }

// Index j when v is exactly +-e_j.
std::optional<Eigen::Index> coordinate_axis(const Vector& v) {
  Eigen::Index j = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    if (j >= 0) return std::nullopt;
    j = i;
  }
  if (j < 0) return std::nullopt;
  return j;
}

AxisBox extent_rec(const CsgSet::Node& node, bool neg) {
  using N = CsgSet::Node;
  const int n = node.dim;
  return std::visit(
      overloaded{
          [&](const N::Union& u) {
            AxisBox acc = neg ? whole_box(n) : empty_box(n);
            for (const auto& c : u.children) {
              const AxisBox b = extent_rec(c.node(), neg);
              acc = neg ? box_meet(acc, b) : box_hull(acc, b);
            }
            return acc;
          },
          [&](const N::Intersection& u) {
            AxisBox acc = neg ? empty_box(n) : whole_box(n);
            for (const auto& c : u.children) {
              const AxisBox b = extent_rec(c.node(), neg);
              acc = neg ? box_hull(acc, b) : box_meet(acc, b);
            }
            return acc;
          },
          [&](const N::Complement& c) { return extent_rec(c.child.node(), !neg); },
          [&](const N::Everything&) { return neg ? empty_box(n) : whole_box(n); },
          [&](const N::Nothing&) { return neg ? whole_box(n) : empty_box(n); },
          [&](const Ball& b) {
            if (neg) return whole_box(n);
            return AxisBox{b.center.array() - b.radius, b.center.array() + b.radius};
          },
          [&](const Box& b) { return neg ? whole_box(n) : AxisBox{b.lo, b.hi}; },
          [&](const Cylinder& c) {
            AxisBox out = whole_box(n);
            if (neg) return out;
            if (auto j = coordinate_axis(c.axis)) {
              for (Eigen::Index i = 0; i < n; ++i) {
                if (i == *j) continue;
                out.lo[i] = c.point[i] - c.radius;
                out.hi[i] = c.point[i] + c.radius;
              }
            }
            return out;
          },
          [&](const HalfSpace& h) {
            AxisBox out = whole_box(n);
            if (auto j = coordinate_axis(h.normal)) {
              // <n, y> < offset (or > offset when negated) with n = +-e_j.
              const double bound = h.offset / h.normal[*j];
              const bool upper = (h.normal[*j] > 0) != neg;
              if (upper) out.hi[*j] = bound; else out.lo[*j] = bound;
            }
            return out;
          },
          [&](const Paraboloid& p) {
            AxisBox out = whole_box(n);
            if (!neg) out.lo[n - 1] = p.apex[n - 1];
            return out;
          },
      },
      node.kind);
}

void leaves_rec(const CsgSet::Node& node, bool neg, std::vector<LeafRef>& out) {
  using N = CsgSet::Node;
  std::visit(overloaded{
                 [&](const N::Union& u) {
                   for (const auto& c : u.children) leaves_rec(c.node(), neg, out);
                 },
                 [&](const N::Intersection& u) {
                   for (const auto& c : u.children) leaves_rec(c.node(), neg, out);
                 },
                 [&](const N::Complement& c) { leaves_rec(c.child.node(), !neg, out); },
                 [&](const N::Everything&) {},
                 [&](const N::Nothing&) {},
                 [&](const auto&) { out.push_back({&node, neg}); },
             },
             node.kind);
}

// ----- affine subspaces ---------------------------------------------------------

bool is_exact_zero(const Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

// Distance between the affine subspace x + V and the line p + R*axis.
double subspace_line_distance(const Point& x, const Matrix& q, const Point& p, const Vector& axis) {
  const Vector residual = axis - q * (q.transpose() * axis);
  Matrix w = q;
  if (residual.norm() > 1e-12) {
    w.conservativeResize(Eigen::NoChange, q.cols() + 1);
    w.col(q.cols()) = residual.normalized();
  }
  const Vector d = x - p;
  return (d - w * (w.transpose() * d)).norm();
}

struct BoxTest {
  Avoidance status;
  std::optional<Point> hit;
};

// Open box against x + V: alternating projections, then a separating-direction certificate
// or an interior point with margin 1e-9.
BoxTest box_affine_test(const Box& b, const Point& x, const Matrix& q) {
  auto to_affine = [&](const Point& y) -> Point { return x + q * (q.transpose() * (y - x)); };
  Point p = to_affine(0.5 * (b.lo + b.hi));
  Point c = p.cwiseMax(b.lo).cwiseMin(b.hi);
  for (int it = 0; it < 500; ++it) {
    c = p.cwiseMax(b.lo).cwiseMin(b.hi);
    const Point next = to_affine(c);
    if ((next - p).norm() < 1e-15) {
      p = next;
      break;
    }
    p = next;
  }
  const Vector gap = p - c;
  if (gap.norm() > 1e-9) {
    Vector w = gap - q * (q.transpose() * gap);
    if (w.norm() > 0) {
      w.normalize();
      double support = 0.0;
      for (Eigen::Index i = 0; i < w.size(); ++i) support += std::max(w[i] * b.lo[i], w[i] * b.hi[i]);
      if (w.dot(x) - support > 1e-9) return {Avoidance::Avoids, std::nullopt};
    }
  }
  const Point centre_proj = to_affine(0.5 * (b.lo + b.hi));
  for (const Point& cand : {p, centre_proj, Point(0.5 * (p + centre_proj))}) {
    if (leaf_sign(CsgSet::Node::Kind(b), cand) < -1e-9) return {Avoidance::Meets, cand};
  }
  return {Avoidance::Unknown, std::nullopt};
}

// On x + Q t the epigraph margin g(t) = y_N - apex_N - c/2 |y' - apex'|^2 is a concave
// quadratic; x + V avoids the open epigraph iff sup g <= 0. In SVD coordinates of the
// horizontal block Q' = U S V^T every coordinate maximizes separately.
AffineAvoidance paraboloid_affine_test(const Paraboloid& p, const Point& x, const Matrix& q) {
  const Eigen::Index n = x.size();
  const double c = p.curvature;
  if (!(c > 0.0)) return {Avoidance::Unknown, std::nullopt};
  const Vector w = x - p.apex;
  const Matrix qh = q.topRows(n - 1);
  const Vector qn = q.row(n - 1).transpose();
  Eigen::JacobiSVD<Matrix> svd(qh, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const Vector& sig = svd.singularValues();
  const Vector b = v.transpose() * qn;
  const Vector r = u.transpose() * w.head(n - 1);
  constexpr double kZero = 1e-12;
  double sup = w[n - 1];
  for (Eigen::Index i = sig.size(); i < r.size(); ++i) sup -= 0.5 * c * r[i] * r[i];
  Vector z = Vector::Zero(q.cols());
  std::vector<Eigen::Index> unbounded;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double si = i < sig.size() ? sig[i] : 0.0;
    if (si <= kZero) {
      if (std::abs(b[i]) > kZero) unbounded.push_back(i);
      if (i < r.size()) sup -= 0.5 * c * r[i] * r[i];
      continue;
    }
    const double ui = b[i] / (c * si);
    z[i] = (ui - r[i]) / si;
    sup += b[i] * b[i] / (2.0 * c * si * si) - b[i] * r[i] / si;
  }
  const double margin = 1e-10 * (1.0 + std::abs(w[n - 1]) + w.squaredNorm() * c);
  if (unbounded.empty() && sup <= -margin) return {Avoidance::Avoids, std::nullopt};
  if (!unbounded.empty()) {
    const Eigen::Index i = unbounded.front();
    z[i] = (std::abs(sup) + 1.0) / b[i];
    return {Avoidance::Meets, Point(x + q * (v * z))};
  }
  if (sup > margin) return {Avoidance::Meets, Point(x + q * (v * z))};
  return {Avoidance::Unknown, std::nullopt};
}

AffineAvoidance leaf_affine(const CsgSet::Node::Kind& kind, bool neg, const Point& x, const Matrix& q) {
  const int k = static_cast<int>(q.cols());
  return std::visit(
      overloaded{
          [&](const Ball& b) -> AffineAvoidance {
            if (neg) return {k == 0 && leaf_sign(b, x) <= 0.0 ? Avoidance::Avoids : Avoidance::Meets, std::nullopt};
            const Vector d = b.center - x;
            const Vector inplane = q * (q.transpose() * d);
            const double dist = (d - inplane).norm();
            if (dist >= b.radius) return {Avoidance::Avoids, std::nullopt};
            return {Avoidance::Meets, Point(x + inplane)};
          },
          [&](const Cylinder& c) -> AffineAvoidance {
            if (neg) {
              Matrix pq = q - c.axis * (c.axis.transpose() * q);
              const bool inside_closed = perp(x - c.point, c.axis).norm() <= c.radius;
              return {is_exact_zero(pq) && inside_closed ? Avoidance::Avoids : Avoidance::Meets, std::nullopt};
            }
            const double dist = subspace_line_distance(x, q, c.point, c.axis);
            return {dist >= c.radius ? Avoidance::Avoids : Avoidance::Meets, std::nullopt};
          },
          [&](const HalfSpace& h) -> AffineAvoidance {
            const Vector qn = q.transpose() * h.normal;
            if (!is_exact_zero(qn)) return {Avoidance::Meets, std::nullopt};
            const double s = h.normal.dot(x) - h.offset;
            const bool avoids = neg ? s <= 0.0 : s >= 0.0;
            return {avoids ? Avoidance::Avoids : Avoidance::Meets, std::nullopt};
          },
          [&](const Box& b) -> AffineAvoidance {
            if (neg) return {k == 0 && leaf_sign(b, x) <= 0.0 ? Avoidance::Avoids : Avoidance::Meets, std::nullopt};
            auto t = box_affine_test(b, x, q);
            return {t.status, t.hit};
          },
          [&](const Paraboloid& p) -> AffineAvoidance {
            if (neg && k > 0) return {Avoidance::Meets, std::nullopt};
            if (k == 0) {
              const double f = leaf_sign(p, x);
              return {(neg ? f > 0.0 : f < 0.0) ? Avoidance::Meets : Avoidance::Avoids, std::nullopt};
            }
            return paraboloid_affine_test(p, x, q);
          },
          [&](const auto&) -> AffineAvoidance { return {Avoidance::Unknown, std::nullopt}; },
      },
      kind);
}

AffineAvoidance affine_rec(const CsgSet::Node& node, bool neg, const Point& x, const Matrix& q) {
  using N = CsgSet::Node;
  auto as_union = [&](const std::vector<CsgSet>& children) {
    bool unknown = false;
    for (const auto& c : children) {
      auto r = affine_rec(c.node(), neg, x, q);
      if (r.status == Avoidance::Meets) return AffineAvoidance{Avoidance::Meets, std::nullopt};
      if (r.status == Avoidance::Unknown) unknown = true;
    }
    return AffineAvoidance{unknown ? Avoidance::Unknown : Avoidance::Avoids, std::nullopt};
  };
  auto as_intersection = [&](const std::vector<CsgSet>& children) {
    for (const auto& c : children) {
      if (affine_rec(c.node(), neg, x, q).status == Avoidance::Avoids)
        return AffineAvoidance{Avoidance::Avoids, std::nullopt};
    }
    return AffineAvoidance{Avoidance::Unknown, std::nullopt};
  };
  return std::visit(overloaded{
                        [&](const N::Union& u) { return neg ? as_intersection(u.children) : as_union(u.children); },
                        [&](const N::Intersection& u) {
                          return neg ? as_union(u.children) : as_intersection(u.children);
                        },
                        [&](const N::Complement& c) { return affine_rec(c.child.node(), !neg, x, q); },
                        [&](const N::Everything&) {
                          return AffineAvoidance{neg ? Avoidance::Avoids : Avoidance::Meets, std::nullopt};
                        },
                        [&](const N::Nothing&) {
                          return AffineAvoidance{neg ? Avoidance::Meets : Avoidance::Avoids, std::nullopt};
                        },
                        [&](const auto&) { return leaf_affine(node.kind, neg, x, q); },
                    },
                    node.kind);
}

// Point x + v on the line c + t*axis_dir, if the system is solvable.
std::optional<Point> project_along(const Point& x, const Matrix& q, const Point& c, const Vector& dir) {
  const Eigen::Index k = q.cols();
  Matrix a(q.rows(), k + 1);
  a.leftCols(k) = q;
  a.col(k) = -dir;
  const Vector rhs = c - x;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < k + 1) return std::nullopt;
  const Vector sol = qr.solve(rhs);
  if ((a * sol - rhs).norm() > 1e-10 * (1.0 + rhs.norm())) return std::nullopt;
  return Point(x + q * sol.head(k));
}

Point leaf_anchor(const CsgSet::Node::Kind& kind, int n) {
  return std::visit(overloaded{
                        [&](const Ball& b) -> Point { return b.center; },
                        [&](const Box& b) -> Point { return 0.5 * (b.lo + b.hi); },
                        [&](const Cylinder& c) -> Point { return c.point; },
                        [&](const HalfSpace& h) -> Point { return (h.offset - 1.0) * h.normal; },
                        [&](const Paraboloid& p) -> Point {
                          Point a = p.apex;
                          a[n - 1] += 1.0 / p.curvature;
                          return a;
                        },
                        [&](const auto&) -> Point { return Point::Zero(n); },
                    },
                    kind);
}

}  // namespace

// ----- CsgSet ---------------------------------------------------------------

CsgSet CsgSet::ball(Point center, double radius) {
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorKind::ValidationError, "ball radius must be > 0");
  const int n = static_cast<int>(center.size());
  return CsgSet(std::make_shared<const Node>(Node{n, Ball{std::move(center), radius}}));
}

CsgSet CsgSet::box(Point lo, Point hi) {
  require_finite(lo, "box lo");
  require_finite(hi, "box hi");
  if (lo.size() != hi.size()) throw Error(ErrorKind::DimensionMismatch, "box corners differ in dimension");
  if (!(lo.array() < hi.array()).all()) throw Error(ErrorKind::ValidationError, "box needs lo < hi componentwise");
  const int n = static_cast<int>(lo.size());
  return CsgSet(std::make_shared<const Node>(Node{n, Box{std::move(lo), std::move(hi)}}));
}

CsgSet CsgSet::half_space(Vector normal, double offset) {
  require_finite(normal, "half-space normal");
  const double len = normal.norm();
  if (!(len > 0.0) || !std::isfinite(offset)) throw Error(ErrorKind::ValidationError, "half-space needs nonzero normal");
  const int n = static_cast<int>(normal.size());
  return CsgSet(std::make_shared<const Node>(Node{n, HalfSpace{normal / len, offset / len}}));
}

CsgSet CsgSet::cylinder(Point point, Vector axis, double radius) {
  require_finite(point, "cylinder point");
  require_finite(axis, "cylinder axis");
  if (point.size() != axis.size()) throw Error(ErrorKind::DimensionMismatch, "cylinder point/axis dimensions differ");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorKind::ValidationError, "cylinder radius must be > 0");
  const double len = axis.norm();
  if (!(len > 0.0)) throw Error(ErrorKind::ValidationError, "cylinder axis must be nonzero");
  const int n = static_cast<int>(point.size());
  return CsgSet(std::make_shared<const Node>(Node{n, Cylinder{std::move(point), axis / len, radius}}));
}

CsgSet CsgSet::paraboloid(Point apex, double curvature) {
  require_finite(apex, "paraboloid apex");
  if (apex.size() < 2) throw Error(ErrorKind::InvalidDimension, "paraboloid needs N >= 2");
  if (!(curvature > 0.0) || !std::isfinite(curvature))
    throw Error(ErrorKind::ValidationError, "paraboloid curvature must be > 0");
  const int n = static_cast<int>(apex.size());
  return CsgSet(std::make_shared<const Node>(Node{n, Paraboloid{std::move(apex), curvature}}));
}

CsgSet CsgSet::everything(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  return CsgSet(std::make_shared<const Node>(Node{n, Node::Everything{}}));
}

CsgSet CsgSet::nothing(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  return CsgSet(std::make_shared<const Node>(Node{n, Node::Nothing{}}));
}

CsgSet CsgSet::unite(std::vector<CsgSet> children) {
  if (children.empty()) throw Error(ErrorKind::ValidationError, "union needs at least one child");
  const int n = children.front().dim();
  for (const auto& c : children)
    if (c.dim() != n) throw Error(ErrorKind::DimensionMismatch, "union children differ in dimension");
  return CsgSet(std::make_shared<const Node>(Node{n, Node::Union{std::move(children)}}));
}

CsgSet CsgSet::intersect(std::vector<CsgSet> children) {
  if (children.empty()) throw Error(ErrorKind::ValidationError, "intersection needs at least one child");
  const int n = children.front().dim();
  for (const auto& c : children)
    if (c.dim() != n) throw Error(ErrorKind::DimensionMismatch, "intersection children differ in dimension");
  return CsgSet(std::make_shared<const Node>(Node{n, Node::Intersection{std::move(children)}}));
}

CsgSet CsgSet::complement(CsgSet child) {
  const int n = child.dim();
  return CsgSet(std::make_shared<const Node>(Node{n, Node::Complement{std::move(child)}}));
}

int CsgSet::dim() const { return node_->dim; }

std::string CsgSet::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto vec = [&](const Vector& v) {
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
  };
  std::visit(overloaded{
                 [&](const Ball& b) { os << "ball"; vec(b.center); os << " r=" << b.radius; },
                 [&](const Box& b) { os << "box"; vec(b.lo); vec(b.hi); },
                 [&](const HalfSpace& h) { os << "halfspace n="; vec(h.normal); os << " c=" << h.offset; },
                 [&](const Cylinder& c) { os << "cylinder p="; vec(c.point); os << " a="; vec(c.axis); os << " r=" << c.radius; },
                 [&](const Paraboloid& p) { os << "paraboloid apex="; vec(p.apex); os << " c=" << p.curvature; },
                 [&](const Node::Union& u) {
                   os << "union[";
                   for (std::size_t i = 0; i < u.children.size(); ++i) os << (i ? "; " : "") << u.children[i].describe();
                   os << ']';
                 },
                 [&](const Node::Intersection& u) {
                   os << "intersection[";
                   for (std::size_t i = 0; i < u.children.size(); ++i) os << (i ? "; " : "") << u.children[i].describe();
                   os << ']';
                 },
                 [&](const Node::Complement& c) { os << "complement[" << c.child.describe() << ']'; },
                 [&](const Node::Everything&) { os << "everything"; },
                 [&](const Node::Nothing&) { os << "nothing"; },
             },
             node_->kind);
  return os.str();
}

// ----- IntervalList -----------------------------------------------------------

IntervalList IntervalList::whole_line() { return single(-kInf, kInf); }

IntervalList IntervalList::single(double lo, double hi) {
  IntervalList out;
  if (lo < hi) out.pieces_.push_back({lo, hi});
  return out;
}

IntervalList IntervalList::from(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalList out;
  for (const auto& iv : pieces) {
    // Open intervals sharing only an endpoint stay separate: the endpoint is not covered.
    if (!out.pieces_.empty() && iv.lo < out.pieces_.back().hi) {
      out.pieces_.back().hi = std::max(out.pieces_.back().hi, iv.hi);
    } else {
      out.pieces_.push_back(iv);
    }
  }
  return out;
}

bool IntervalList::contains(double t) const {
  return std::any_of(pieces_.begin(), pieces_.end(), [t](const Interval& iv) { return iv.lo < t && t < iv.hi; });
}

IntervalList IntervalList::unite(const IntervalList& other) const {
  std::vector<Interval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return from(std::move(all));
}

IntervalList IntervalList::intersect(const IntervalList& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const double lo = std::max(pieces_[i].lo, other.pieces_[j].lo);
    const double hi = std::min(pieces_[i].hi, other.pieces_[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (pieces_[i].hi < other.pieces_[j].hi) ++i; else ++j;
  }
  IntervalList r;
  r.pieces_ = std::move(out);
  return r;
}

IntervalList IntervalList::mirrored() const {
  IntervalList r;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) r.pieces_.push_back({-it->hi, -it->lo});
  return r;
}

double IntervalList::measure(double cap) const {
  double total = 0.0;
  for (const auto& iv : pieces_) {
    const double lo = std::max(iv.lo, -cap);
    const double hi = std::min(iv.hi, cap);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

// ----- queries ------------------------------------------------------------------

bool contains(const CsgSet& set, const Point& p) {
  require_dim(set, p.size());
  return contains_rec(set.node(), false, p);
}

IntervalList line_intersection_intervals(const CsgSet& set, const Point& x, const Vector& direction) {
  require_dim(set, x.size());
  require_dim(set, direction.size());
  return line_rec(set.node(), false, x, direction);
}

bool line_avoids(const CsgSet& set, const Point& x, const UnitDirection& xi) {
  return line_intersection_intervals(set, x, xi).empty();
}

AffineAvoidance decide_affine_avoidance(const CsgSet& set, const Point& x, const Subspace& v) {
  require_dim(set, x.size());
  require_dim(set, v.ambient_dim());
  AffineAvoidance r = affine_rec(set.node(), false, x, v.basis().matrix());
  if (r.status == Avoidance::Avoids) return r;
  if (r.hit && contains(set, *r.hit)) return r;
  if (auto hit = find_affine_hit(set, x, v)) return {Avoidance::Meets, hit};
  // A Meets from the exact leaf rules stays valid without an explicit point.
  if (r.status == Avoidance::Meets) return {Avoidance::Meets, std::nullopt};
  return {Avoidance::Unknown, std::nullopt};
}

bool affine_subspace_avoids(const CsgSet& set, const Point& x, const Subspace& v) {
  const AffineAvoidance r = decide_affine_avoidance(set, x, v);
  if (r.status == Avoidance::Unknown)
    throw Error(ErrorKind::UndecidablePrimitive, "no exact rule decides this subspace against " + set.describe());
  return r.status == Avoidance::Avoids;
}

std::optional<Point> find_affine_hit(const CsgSet& set, const Point& x, const Subspace& v) {
  const int n = set.dim();
  const Matrix& q = v.basis().matrix();
  const auto k = q.cols();
  for (const LeafRef& leaf : leaves(set)) {
    if (leaf.negated) continue;
    const Point anchor = leaf_anchor(leaf.node->kind, n);
    for (int axis = n - 1; axis >= 0; --axis) {
      if (auto p = project_along(x, q, anchor, Vector::Unit(n, axis)); p && contains(set, *p)) return p;
    }
    Point ortho = x + q * (q.transpose() * (anchor - x));
    if (const auto* cyl = std::get_if<Cylinder>(&leaf.node->kind)) {
      // Closest point of x + V to the cylinder axis.
      Matrix a(n, k + 1);
      a.leftCols(k) = q;
      a.col(k) = -cyl->axis;
      const Vector sol = a.colPivHouseholderQr().solve(Vector(cyl->point - x));
      ortho = x + q * sol.head(k);
    }
    if (contains(set, ortho)) return ortho;
  }
  // Line sweeps inside V.
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < k; ++i) dirs.emplace_back(q.col(i));
  for (const LeafRef& leaf : leaves(set)) {
    if (const auto* cyl = std::get_if<Cylinder>(&leaf.node->kind)) {
      const Vector w = q.transpose() * cyl->axis;
      // Direction of V orthogonal to the cylinder axis (exists when k >= 2).
      if (k >= 2) {
        Matrix basis = complement_basis(w.normalized());
        if (w.norm() == 0.0) basis = Matrix::Identity(k, k);
        if (basis.cols() > 0) dirs.emplace_back(q * basis.col(0));
      }
    }
  }
  constexpr int kSweep = 72;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      for (int a = 1; a < kSweep; ++a) {
        const double th = M_PI * a / kSweep;
        dirs.emplace_back(std::cos(th) * q.col(i) + std::sin(th) * q.col(j));
      }
  for (const auto& d : dirs) {
    const IntervalList iv = line_intersection_intervals(set, x, d);
    for (const auto& piece : iv.pieces()) {
      double t;
      if (std::isfinite(piece.lo) && std::isfinite(piece.hi)) t = 0.5 * (piece.lo + piece.hi);
      else if (std::isfinite(piece.lo)) t = piece.lo + 1.0;
      else if (std::isfinite(piece.hi)) t = piece.hi - 1.0;
      else t = 0.0;
      const Point p = x + t * d;
      if (contains(set, p)) return p;
    }
  }
  return std::nullopt;
}

DistanceBracket distance_bracket(const CsgSet& set, const Point& x) {
  require_dim(set, x.size());
  if (!contains(set, x)) return {0.0, 0.0, x};
  const DistInfo info = dist_rec(set.node(), false, x);
  const double lo = info.d;
  if (!std::isfinite(lo)) return {kInf, kInf, x};
  const int n = set.dim();

  Vector best_dir = info.nearest - x;
  if (!(best_dir.norm() > 0.0)) best_dir = Vector::Unit(n, 0);
  best_dir.normalize();
  double hi = exit_time(set, x, best_dir);
  if (hi - lo > 1e-9) {
    for (int i = 0; i < n; ++i)
      for (double sgn : {1.0, -1.0}) {
        const Vector d = sgn * Vector::Unit(n, i);
        const double t = exit_time(set, x, d);
        if (t < hi) {
          hi = t;
          best_dir = d;
        }
      }
    // Pattern search over the sphere for the shortest exit.
    double step = 0.25;
    int evals = 0;
    while (hi - lo > 1e-9 && step > 1e-10 && evals < 4000) {
      bool improved = false;
      const Matrix tangent = complement_basis(best_dir);
      for (Eigen::Index j = 0; j < tangent.cols() && !improved; ++j)
        for (double sgn : {1.0, -1.0}) {
          const Vector d = (std::cos(step) * best_dir + sgn * std::sin(step) * tangent.col(j)).normalized();
          const double t = exit_time(set, x, d);
          ++evals;
          if (t < hi) {
            hi = t;
            best_dir = d;
            improved = true;
            break;
          }
        }
      if (!improved) step *= 0.5;
    }
  }
  return {std::min(lo, hi), hi, Point(x + hi * best_dir)};
}

double distance_to_complement(const CsgSet& set, const Point& x) {
  const DistanceBracket b = distance_bracket(set, x);
  return std::isfinite(b.hi) ? b.hi : b.lo;
}

double depth_lower_bound(const CsgSet& set, const Point& x) {
  require_dim(set, x.size());
  return dist_rec(set.node(), false, x).d;
}

double exterior_distance_lower_bound(const CsgSet& set, const Point& x) {
  require_dim(set, x.size());
  return dist_rec(set.node(), true, x).d;
}

double distance_smooth_radius(const CsgSet& set, const Point& x) {
  require_dim(set, x.size());
  return dist_rec(set.node(), false, x).radius;
}

AxisBox extent_box(const CsgSet& set) { return extent_rec(set.node(), false); }

std::optional<AxisBox> bounding_box(const CsgSet& set) {
  AxisBox b = extent_box(set);
  if (!b.lo.allFinite() || !b.hi.allFinite()) return std::nullopt;
  if (box_empty(b)) return AxisBox{Vector::Zero(set.dim()), Vector::Zero(set.dim())};
  return b;
}

bool is_bounded(const CsgSet& set) { return bounding_box(set).has_value(); }

std::vector<LeafRef> leaves(const CsgSet& set) {
  std::vector<LeafRef> out;
  leaves_rec(set.node(), false, out);
  return out;
}

CsgSet rigid_transform(const CsgSet& set, const Matrix& r, const Vector& t) {
  using N = CsgSet::Node;
  const int n = set.dim();
  if (r.rows() != n || r.cols() != n || t.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "rigid motion dimension");
  const bool identity = r.isIdentity(0.0);
  return std::visit(
      overloaded{
          [&](const Ball& b) { return CsgSet::ball(r * b.center + t, b.radius); },
          [&](const Box& b) {
            if (!identity) throw Error(ErrorKind::ValidationError, "boxes only admit translations");
            return CsgSet::box(b.lo + t, b.hi + t);
          },
          [&](const HalfSpace& h) {
            const Vector nn = r * h.normal;
            return CsgSet::half_space(nn, h.offset + nn.dot(t));
          },
          [&](const Cylinder& c) { return CsgSet::cylinder(r * c.point + t, r * c.axis, c.radius); },
          [&](const Paraboloid& p) {
            if (!identity) throw Error(ErrorKind::ValidationError, "paraboloids only admit translations");
            return CsgSet::paraboloid(p.apex + t, p.curvature);
          },
          [&](const N::Union& u) {
            std::vector<CsgSet> kids;
            for (const auto& c : u.children) kids.push_back(rigid_transform(c, r, t));
            return CsgSet::unite(std::move(kids));
          },
          [&](const N::Intersection& u) {
            std::vector<CsgSet> kids;
            for (const auto& c : u.children) kids.push_back(rigid_transform(c, r, t));
            return CsgSet::intersect(std::move(kids));
          },
          [&](const N::Complement& c) { return CsgSet::complement(rigid_transform(c.child, r, t)); },
          [&](const N::Everything&) { return CsgSet::everything(n); },
          [&](const N::Nothing&) { return CsgSet::nothing(n); },
      },
      set.node().kind);
}

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Holds: return "holds";
    case VerdictStatus::Fails: return "fails";
    case VerdictStatus::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// ----- grid components --------------------------------------------------------

std::vector<Component> connected_components(const CsgSet& set, const AxisBox& box, double h) {
  const int n = set.dim();
  if (!(h > 0.0)) throw Error(ErrorKind::ValidationError, "grid spacing must be > 0");
  if (box.lo.size() != n || box.hi.size() != n) throw Error(ErrorKind::DimensionMismatch, "box dimension");
  std::vector<long> counts(static_cast<std::size_t>(n));
  long total = 1;
  for (int i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(i)] = static_cast<long>(std::floor((box.hi[i] - box.lo[i]) / h + 1e-9)) + 1;
    if (counts[static_cast<std::size_t>(i)] < 1) throw Error(ErrorKind::ValidationError, "empty grid box");
    total *= counts[static_cast<std::size_t>(i)];
    if (total > 100'000'000) throw Error(ErrorKind::ValidationError, "grid too fine");
  }
  auto unflatten = [&](long flat) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(flat % counts[static_cast<std::size_t>(i)]);
      flat /= counts[static_cast<std::size_t>(i)];
    }
    return idx;
  };
  auto coords = [&](const std::vector<int>& idx) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = box.lo[i] + idx[static_cast<std::size_t>(i)] * h;
    return p;
  };
  std::vector<char> inside(static_cast<std::size_t>(total));
  for (long f = 0; f < total; ++f) inside[static_cast<std::size_t>(f)] = contains(set, coords(unflatten(f))) ? 1 : 0;

  std::vector<int> label(static_cast<std::size_t>(total), -1);
  std::vector<Component> comps;
  std::deque<long> queue;
  for (long start = 0; start < total; ++start) {
    if (!inside[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    label[static_cast<std::size_t>(start)] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const long f = queue.front();
      queue.pop_front();
      const auto idx = unflatten(f);
      comps.back().indices.push_back(idx);
      comps.back().points.push_back(coords(idx));
      long stride = 1;
      for (int i = 0; i < n; ++i) {
        const int c = idx[static_cast<std::size_t>(i)];
        for (int step : {-1, 1}) {
          const int nc = c + step;
          if (nc < 0 || nc >= counts[static_cast<std::size_t>(i)]) continue;
          const long g = f + step * stride;
          if (inside[static_cast<std::size_t>(g)] && label[static_cast<std::size_t>(g)] < 0) {
            label[static_cast<std::size_t>(g)] = id;
            queue.push_back(g);
          }
        }
        stride *= counts[static_cast<std::size_t>(i)];
      }
    }
  }
  if (comps.empty()) throw Error(ErrorKind::EmptySample, "no grid point lies in the set");
  return comps;
}

PredicateVerdict is_component_convex(const Component& component, const CsgSet& set, int m) {
  if (m < 2) throw Error(ErrorKind::ValidationError, "need m >= 2 segment samples");
  const std::size_t count = component.points.size();
  PredicateVerdict v;
  v.resolution = m;
  if (count < 2) {
    v.status = VerdictStatus::Holds;
    v.detail = "single grid point";
    return v;
  }
  const std::size_t n = component.indices.front().size();

  // Pairs: reflections through the index-space centroid, then seeded random pairs.
  std::vector<double> centroid(n, 0.0);
  for (const auto& idx : component.indices)
    for (std::size_t i = 0; i < n; ++i) centroid[i] += idx[i];
  for (auto& c : centroid) c /= static_cast<double>(count);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  {
    std::vector<std::pair<std::vector<int>, std::size_t>> lookup;
    lookup.reserve(count);
    for (std::size_t i = 0; i < count; ++i) lookup.emplace_back(component.indices[i], i);
    std::sort(lookup.begin(), lookup.end());
    const std::size_t stride = std::max<std::size_t>(1, count / 2000);
    for (std::size_t i = 0; i < count; i += stride) {
      std::vector<int> refl(n);
      for (std::size_t d = 0; d < n; ++d)
        refl[d] = static_cast<int>(std::lround(2.0 * centroid[d] - component.indices[i][d]));
      auto it = std::lower_bound(lookup.begin(), lookup.end(), std::make_pair(refl, std::size_t{0}));
      if (it != lookup.end() && it->first == refl && it->second != i) pairs.emplace_back(i, it->second);
    }
  }
  std::mt19937_64 rng(0);
  std::uniform_int_distribution<std::size_t> pick(0, count - 1);
  for (int r = 0; r < 2000; ++r) pairs.emplace_back(pick(rng), pick(rng));

  for (const auto& [a, b] : pairs) {
    const Point& p = component.points[a];
    const Point& q = component.points[b];
    const Point mid = 0.5 * (p + q);
    if (!contains(set, mid)) {
      v.status = VerdictStatus::Fails;
      v.certificate = mid;
      v.detail = "segment midpoint outside the set";
      return v;
    }
    for (int j = 1; j <= m; ++j) {
      const double t = static_cast<double>(j) / (m + 1);
      const Point s = (1.0 - t) * p + t * q;
      if (!contains(set, s)) {
        v.status = VerdictStatus::Fails;
        v.certificate = s;
        v.detail = "segment sample outside the set";
        return v;
      }
    }
  }
  v.status = VerdictStatus::Holds;
  v.detail = "convex at sampling resolution m=" + std::to_string(m) + " over " + std::to_string(pairs.size()) + " pairs";
  return v;
}

}  // namespace fraclab
