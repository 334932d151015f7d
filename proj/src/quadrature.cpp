#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_s(double s) {
  if (!(s >= kMinS && s <= kMaxS)) throw Error(ErrorKind::OutOfRange, "s must lie in [1e-3, 1-1e-3]");
}

void check_inputs(const ScalarField& u, const Point& x, const UnitDirection& xi) {
  if (x.size() != u.dim() || xi.dim() != u.dim())
    throw Error(ErrorKind::DimensionMismatch, "point/direction dimension differs from field");
  if (!x.allFinite()) throw Error(ErrorKind::ValidationError, "point must be finite");
}

// int_a^b t^{-1-2s} dt for 0 <= a < b <= inf.
double power_integral(double a, double b, double s) {
  if (a <= 0.0) return kInf;
  const double fb = std::isfinite(b) ? std::pow(b, -2.0 * s) : 0.0;
  return (std::pow(a, -2.0 * s) - fb) / (2.0 * s);
}

const GaussRule& cached_rule(int n, double beta) {
  thread_local std::map<std::pair<int, double>, GaussRule> cache;
  auto key = std::make_pair(n, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, gauss_jacobi(n, 0.0, beta)).first;
  return it->second;
}

// Positive half-line part of an interval list, optionally clipped to (start, inf).
std::vector<Interval> positive_part(const IntervalList& list, double start) {
  std::vector<Interval> out;
  for (const auto& p : list.pieces()) {
    const double lo = std::max(p.lo, start);
    if (lo < p.hi) out.push_back({lo, p.hi});
  }
  return out;
}

// Exact indicator pathway: sum over both half-lines of +int over the set (base 0) or
// -int over the gaps (base 1), restricted to (start, inf).
OperatorValue indicator_value(const IntervalList& line, double base, double s, double start) {
  const double cs = normalization_constant(s);
  double total = 0.0;
  int terms = 0;
  for (const IntervalList& side : {line, line.mirrored()}) {
    const auto pieces = positive_part(side, start);
    if (base == 0.0) {
      for (const auto& p : pieces) {
        total += power_integral(p.lo, p.hi, s);
        ++terms;
      }
    } else {
      double prev = start;
      for (const auto& p : pieces) {
        if (p.lo > prev) {
          total -= power_integral(prev, p.lo, s);
          ++terms;
        }
        prev = std::max(prev, p.hi);
      }
      if (std::isfinite(prev)) {
        total -= power_integral(prev, kInf, s);
        ++terms;
      }
    }
  }
  OperatorValue v;
  v.value = cs * total;
  const double err = std::isfinite(v.value) ? 8.0 * kEps * std::abs(v.value) * (terms + 1) : 0.0;
  v.lo = v.value - err;
  v.hi = v.value + err;
  v.radius = kInf;
  v.note = "exact";
  return v;
}

struct Tail {
  double radius;
  double center;  // already multiplied by C_s
  double error;
};

// Truncation radius and tail bracket for int_R^inf (u(x+t xi) + u(x-t xi) - 2 base) t^{-1-2s} dt.
Tail choose_tail(const ScalarField& u, const Point& x, const Vector& xi, double s, double base, double lower,
                 const QuadratureSpec& spec) {
  const double cs = normalization_constant(s);
  const double scale = cs / (2.0 * s);
  const double support = u.line_support_end(x, xi);
  if (std::isfinite(support)) {
    const double r = std::max(support, lower);
    const double limit = u.far_limit(x, xi);
    return {r, scale * (2.0 * limit - 2.0 * base) * std::pow(r, -2.0 * s), 0.0};
  }
  const double sup = u.sup_bound();
  if (std::isfinite(sup)) {
    const double limit = u.far_limit(x, xi);
    const double cap = std::min(spec.max_radius, std::max(tail_radius(sup + std::abs(limit), base, s, spec.tail_tol),
                                                          2.0 * lower));
    double r = std::max(1.0, 2.0 * lower);
    while (r < cap && 2.0 * scale * u.far_deviation(x, xi, r) * std::pow(r, -2.0 * s) > spec.tail_tol) r *= 2.0;
    r = std::min(r, cap);
    const double dev = u.far_deviation(x, xi, r);
    return {r, scale * (2.0 * limit - 2.0 * base) * std::pow(r, -2.0 * s), 2.0 * scale * dev * std::pow(r, -2.0 * s)};
  }
  const double lip = u.lipschitz();
  if (std::isfinite(lip)) {
    if (!(s > 0.5))
      throw Error(ErrorKind::UnboundedWithoutTruncation, "unbounded Lipschitz field needs s > 1/2 or truncation");
    // |u(x +- t xi) - u(x)| <= L t; in the punctured case u(x) = 0 gives the same bound.
    const double k = cs * 2.0 * lip / (2.0 * s - 1.0);
    double r = std::pow(k / spec.tail_tol, 1.0 / (2.0 * s - 1.0));
    r = std::min(std::max(r, 2.0 * lower), spec.max_radius);
    return {r, 0.0, k * std::pow(r, 1.0 - 2.0 * s)};
  }
  throw Error(ErrorKind::DivergentTail, "field has neither a sup bound nor a Lipschitz bound");
}

struct Piece {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Piece integrate_panels(F&& h, double a, double b, std::vector<double> breaks) {
  Piece out;
  if (!(b > a)) return out;
  std::vector<double> pts{a, b};
  for (double t : breaks)
    if (t > a && t < b) pts.push_back(t);
  for (double t = 2.0 * a; t < b; t *= 2.0) pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = GK::integrate(h, pts[i], pts[i + 1], 12, 1e-11, &err, &l1);
    out.value += v;
    out.error += std::max(err, 16.0 * kEps * l1);
  }
  return out;
}

enum class Mode { Full, From, Punctured };

OperatorValue integrate_line(const ScalarField& u, const Point& x, const UnitDirection& dir, double s,
                             double start, const QuadratureSpec& spec, Mode mode) {
  check_s(s);
  spec.validate();
  check_inputs(u, x, dir);
  const Vector& xi = dir.coords();
  double base = u.value(x);
  if (mode == Mode::Punctured) {
    if (!(std::abs(base) <= 1e-12))
      throw Error(ErrorKind::PreconditionViolated, "punctured integral needs u(x) = 0");
    base = 0.0;
  }
  if (mode != Mode::Full && !(start > 0.0)) throw Error(ErrorKind::ValidationError, "puncture radius must be > 0");

  if (const CsgSet* set = u.indicator_set()) {
    const IntervalList line = line_intersection_intervals(*set, x, xi);
    return indicator_value(line, base, s, mode == Mode::Full ? 0.0 : start);
  }

  const double cs = normalization_constant(s);
  auto sample = [&](double t) {
    const double a = u.value(Point(x + t * xi));
    const double b = u.value(Point(x - t * xi));
    if (mode == Mode::Punctured && (a < -1e-12 || b < -1e-12))
      throw Error(ErrorKind::PreconditionViolated, "negative field sample in punctured integral");
    return std::make_pair(a, b);
  };
  std::vector<double> breaks = u.line_breakpoints(x, xi);

  double inner = 0.0;
  double inner_err = 0.0;
  double lower = start;
  if (mode == Mode::Full) {
    const double c2 = u.c2_radius(x);
    if (!(c2 > 0.0)) throw Error(ErrorKind::NotClassicallyEvaluable, "field is not C^2 near the point");
    double r_in = std::min(spec.split_radius, 0.5 * c2);
    for (double t : breaks)
      if (t > 0.0) r_in = std::min(r_in, 0.5 * t);
    lower = r_in;
    const double beta = 1.0 - 2.0 * s;
    const GaussRule& full = cached_rule(spec.inner_nodes, beta);
    const GaussRule& half = cached_rule(spec.inner_nodes / 2, beta);
    const double factor = std::pow(0.5 * r_in, beta + 1.0);
    auto apply = [&](const GaussRule& rule, double* rounding) {
      double q = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = 0.5 * r_in * (1.0 + rule.nodes[i]);
        const auto [a, b] = sample(t);
        q += rule.weights[i] * (a + b - 2.0 * base) / (t * t);
        if (rounding) *rounding += rule.weights[i] * 4.0 * kEps * (std::abs(a) + std::abs(b) + 2.0 * std::abs(base)) / (t * t);
      }
      return q;
    };
    double rounding = 0.0;
    const double qn = apply(full, &rounding);
    const double qh = apply(half, nullptr);
    inner = factor * qn;
    inner_err = factor * (std::abs(qn - qh) + rounding);
  }

  const Tail tail = choose_tail(u, x, xi, s, base, lower, spec);
  auto h = [&](double t) {
    const auto [a, b] = sample(t);
    return (a + b - 2.0 * base) * std::pow(t, -1.0 - 2.0 * s);
  };
  const Piece outer = integrate_panels(h, lower, tail.radius, breaks);

  OperatorValue v;
  v.value = cs * (inner + outer.value) + tail.center;
  const double err = cs * (inner_err + outer.error) + tail.error + 4.0 * kEps * std::abs(v.value);
  v.lo = v.value - err;
  v.hi = v.value + err;
  v.radius = tail.radius;
  v.note = "quadrature";
  return v;
}

}  // namespace

void FracParams::validate() const {
  check_s(s);
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidDimension, "k must lie in [1, N]");
}

void QuadratureSpec::validate() const {
  if (!(split_radius > 0.0)) throw Error(ErrorKind::ValidationError, "split radius must be > 0");
  if (inner_nodes < 8) throw Error(ErrorKind::ValidationError, "inner rule needs >= 8 nodes");
  if (!(outer_tol > 0.0) || !(tail_tol > 0.0)) throw Error(ErrorKind::ValidationError, "tolerances must be > 0");
  if (!(max_radius > split_radius)) throw Error(ErrorKind::ValidationError, "max radius must exceed split radius");
}

OperatorValue operator+(const OperatorValue& a, const OperatorValue& b) {
  OperatorValue r;
  r.value = a.value + b.value;
  r.lo = a.lo + b.lo;
  r.hi = a.hi + b.hi;
  r.radius = std::max(a.radius, b.radius);
  r.note = a.note == b.note ? a.note : a.note + "+" + b.note;
  return r;
}

GaussRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw Error(ErrorKind::ValidationError, "rule needs n >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) throw Error(ErrorKind::ValidationError, "Jacobi exponents must be > -1");
  // Golub-Welsch on the monic Jacobi recurrence.
  Matrix j = Matrix::Zero(n, n);
  const double ab = alpha + beta;
  for (int i = 0; i < n; ++i) {
    const double d = 2.0 * i + ab;
    j(i, i) = i == 0 ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (d * (d + 2.0));
    if (i + 1 < n) {
      const double m = i + 1.0;
      const double dm = 2.0 * m + ab;
      const double b2 = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (dm * dm * (dm + 1.0) * (dm - 1.0));
      j(i, i + 1) = j(i + 1, i) = std::sqrt(b2);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) / std::tgamma(ab + 2.0);
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v * v;
  }
  return rule;
}

double normalization_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::OutOfRange, "s must lie in (0,1)");
  return std::pow(4.0, s) * s * std::tgamma(0.5 + s) / (std::sqrt(M_PI) * std::tgamma(1.0 - s));
}

double tail_radius(double sup_bound, double base_value, double s, double tail_tol) {
  if (!(tail_tol > 0.0)) throw Error(ErrorKind::ValidationError, "tail tolerance must be > 0");
  const double m = 2.0 * sup_bound + 2.0 * std::abs(base_value);
  if (!(m > 0.0)) return 0.0;
  const double c = normalization_constant(s) * m / (2.0 * s * tail_tol);
  return std::pow(c, 1.0 / (2.0 * s));
}

OperatorValue eval_directional(const ScalarField& u, const Point& x, const UnitDirection& xi, double s,
                               const QuadratureSpec& spec) {
  return integrate_line(u, x, xi, s, 0.0, spec, Mode::Full);
}

OperatorValue eval_directional_punctured(const ScalarField& u, const Point& x, const UnitDirection& xi, double s,
                                         double eps, const QuadratureSpec& spec) {
  return integrate_line(u, x, xi, s, eps, spec, Mode::Punctured);
}

OperatorValue eval_directional_from(const ScalarField& u, const Point& x, const UnitDirection& xi, double s,
                                    double eps, const QuadratureSpec& spec) {
  return integrate_line(u, x, xi, s, eps, spec, Mode::From);
}

}  // namespace fraclab
