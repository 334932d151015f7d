#include "fraclab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_point(const ScalarField& u, const Point& y) {
  if (y.size() != u.dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from field");
}

std::string vec_str(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

// Positive parameters where the line meets the boundary of the set, on either side.
std::vector<double> interval_breakpoints(const CsgSet& set, const Point& x, const Vector& xi) {
  std::vector<double> out;
  const IntervalList line = line_intersection_intervals(set, x, xi);
  for (const auto& piece : line.pieces()) {
    for (double t : {piece.lo, piece.hi})
      if (std::isfinite(t) && t != 0.0) out.push_back(std::abs(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double interval_support_end(const CsgSet& set, const Point& x, const Vector& xi) {
  double end = 0.0;
  const IntervalList line = line_intersection_intervals(set, x, xi);
  for (const auto& piece : line.pieces()) {
    if (!std::isfinite(piece.lo) || !std::isfinite(piece.hi)) return kInf;
    end = std::max({end, std::abs(piece.lo), std::abs(piece.hi)});
  }
  return end;
}

class IndicatorField final : public ScalarField {
 public:
  explicit IndicatorField(CsgSet set) : set_(std::move(set)) {}
  int dim() const override { return set_.dim(); }
  double value(const Point& y) const override { return contains(set_, y) ? 1.0 : 0.0; }
  double sup_bound() const override { return 1.0; }
  bool nonnegative() const override { return true; }
  double c2_radius(const Point& y) const override {
    return contains(set_, y) ? depth_lower_bound(set_, y) : exterior_distance_lower_bound(set_, y);
  }
  std::optional<Vector> gradient(const Point& y) const override {
    if (c2_radius(y) > 0) return Vector::Zero(dim());
    return std::nullopt;
  }
  std::optional<Matrix> hessian(const Point& y) const override {
    if (c2_radius(y) > 0) return Matrix::Zero(dim(), dim());
    return std::nullopt;
  }
  const CsgSet* indicator_set() const override { return &set_; }
  const CsgSet* positivity_set() const override { return &set_; }
  double line_support_end(const Point& x, const Vector& xi) const override {
    return interval_support_end(set_, x, xi);
  }
  double far_deviation(const Point&, const Vector&, double) const override { return 1.0; }
  std::vector<double> line_breakpoints(const Point& x, const Vector& xi) const override {
    return interval_breakpoints(set_, x, xi);
  }
  std::string describe() const override { return "indicator of " + set_.describe(); }

 private:
  CsgSet set_;
};

class DistanceField final : public ScalarField {
 public:
  DistanceField(CsgSet set, bool truncated, double sup)
      : set_(std::move(set)), truncated_(truncated), sup_(sup) {}
  int dim() const override { return set_.dim(); }
  double value(const Point& y) const override {
    const double d = distance_to_complement(set_, y);
    return truncated_ ? std::min(d, 1.0) : d;
  }
  double sup_bound() const override { return sup_; }
  double lipschitz() const override { return 1.0; }
  bool nonnegative() const override { return true; }
  double c2_radius(const Point& y) const override {
    if (!contains(set_, y)) return exterior_distance_lower_bound(set_, y);
    const double d = depth_lower_bound(set_, y);
    double r = std::min(distance_smooth_radius(set_, y), d);
    if (truncated_) r = std::min(r, std::abs(d - 1.0));
    return r;
  }
  const CsgSet* positivity_set() const override { return &set_; }
  double line_support_end(const Point& x, const Vector& xi) const override {
    return interval_support_end(set_, x, xi);
  }
  double far_deviation(const Point&, const Vector&, double) const override { return sup_; }
  std::vector<double> line_breakpoints(const Point& x, const Vector& xi) const override {
    return interval_breakpoints(set_, x, xi);
  }
  std::string describe() const override {
    return std::string(truncated_ ? "truncated distance to complement of " : "distance to complement of ") +
           set_.describe();
  }

 private:
  CsgSet set_;
  bool truncated_;
  double sup_;
};

class AnisotropicBump final : public ScalarField {
 public:
  AnisotropicBump(Point center, Matrix a) : c_(std::move(center)), a_(std::move(a)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a_);
    lmin_ = es.eigenvalues().minCoeff();
    lmax_ = es.eigenvalues().maxCoeff();
  }
  int dim() const override { return static_cast<int>(c_.size()); }
  double value(const Point& y) const override {
    const Vector d = y - c_;
    return std::exp(-d.dot(a_ * d));
  }
  double sup_bound() const override { return 1.0; }
  double lipschitz() const override { return std::sqrt(2.0 * lmax_ / std::exp(1.0)); }
  bool nonnegative() const override { return true; }
  double c2_radius(const Point&) const override { return kInf; }
  std::optional<Vector> gradient(const Point& y) const override {
    const Vector d = y - c_;
    return Vector(-2.0 * value(y) * (a_ * d));
  }
  std::optional<Matrix> hessian(const Point& y) const override {
    const Vector ad = a_ * (y - c_);
    return Matrix(value(y) * (4.0 * ad * ad.transpose() - 2.0 * a_));
  }
  double far_deviation(const Point& x, const Vector&, double r) const override {
    const double m = r - (x - c_).norm();
    return m > 0 ? std::exp(-lmin_ * m * m) : 1.0;
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "bump center=" << vec_str(c_) << " diag=" << vec_str(a_.diagonal());
    return os.str();
  }

 private:
  Point c_;
  Matrix a_;
  double lmin_ = 0.0;
  double lmax_ = 0.0;
};

class GetoorProfile final : public ScalarField {
 public:
  GetoorProfile(double s, int n, int axis) : s_(s), n_(n), axis_(axis) {}
  int dim() const override { return n_; }
  double value(const Point& y) const override {
    const double q = 1.0 - y[axis_] * y[axis_];
    return q > 0 ? std::pow(q, s_) : 0.0;
  }
  double sup_bound() const override { return 1.0; }
  bool nonnegative() const override { return true; }
  double c2_radius(const Point& y) const override { return std::abs(1.0 - std::abs(y[axis_])); }
  std::optional<Matrix> hessian(const Point& y) const override {
    const double t = y[axis_];
    const double q = 1.0 - t * t;
    Matrix h = Matrix::Zero(n_, n_);
    if (q > 0) h(axis_, axis_) = -2.0 * s_ * std::pow(q, s_ - 1) + 4.0 * s_ * (s_ - 1) * t * t * std::pow(q, s_ - 2);
    else if (q == 0) return std::nullopt;
    return h;
  }
  double far_limit(const Point& x, const Vector& xi) const override {
    return xi[axis_] == 0.0 ? value(x) : 0.0;
  }
  double line_support_end(const Point& x, const Vector& xi) const override {
    if (xi[axis_] == 0.0) return 0.0;
    return (1.0 + std::abs(x[axis_])) / std::abs(xi[axis_]);
  }
  std::vector<double> line_breakpoints(const Point& x, const Vector& xi) const override {
    if (xi[axis_] == 0.0) return {};
    std::vector<double> out;
    for (double edge : {-1.0, 1.0}) {
      const double t = std::abs((edge - x[axis_]) / xi[axis_]);
      if (t > 0) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "getoor profile s=" << s_ << " axis=" << axis_;
    return os.str();
  }

 private:
  double s_;
  int n_;
  int axis_;
};

class ConstantField final : public ScalarField {
 public:
  ConstantField(int n, double c) : n_(n), c_(c) {}
  int dim() const override { return n_; }
  double value(const Point&) const override { return c_; }
  double sup_bound() const override { return std::abs(c_); }
  double lipschitz() const override { return 0.0; }
  bool nonnegative() const override { return c_ >= 0; }
  double c2_radius(const Point&) const override { return kInf; }
  std::optional<Vector> gradient(const Point&) const override { return Vector::Zero(n_); }
  std::optional<Matrix> hessian(const Point&) const override { return Matrix::Zero(n_, n_); }
  double far_limit(const Point&, const Vector&) const override { return c_; }
  double line_support_end(const Point&, const Vector&) const override { return 0.0; }
  double far_deviation(const Point&, const Vector&, double) const override { return 0.0; }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "constant " << c_;
    return os.str();
  }

 private:
  int n_;
  double c_;
};

class PolyBump final : public ScalarField {
 public:
  PolyBump(Point center, double radius) : c_(std::move(center)), r_(radius) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  double value(const Point& y) const override {
    const double q = 1.0 - (y - c_).squaredNorm() / (r_ * r_);
    return q > 0 ? q * q * q : 0.0;
  }
  double sup_bound() const override { return 1.0; }
  // max |d/dr (1 - r^2)^3| = 6 r (1 - r^2)^2 at r = 1/sqrt5.
  double lipschitz() const override { return 6.0 / std::sqrt(5.0) * 0.64 / r_; }
  bool nonnegative() const override { return true; }
  double c2_radius(const Point&) const override { return kInf; }
  std::optional<Vector> gradient(const Point& y) const override {
    const Vector d = y - c_;
    const double q = std::max(0.0, 1.0 - d.squaredNorm() / (r_ * r_));
    return Vector(-6.0 * q * q / (r_ * r_) * d);
  }
  std::optional<Matrix> hessian(const Point& y) const override {
    const Vector d = y - c_;
    const double q = std::max(0.0, 1.0 - d.squaredNorm() / (r_ * r_));
    const double r2 = r_ * r_;
    const Eigen::Index n = d.size();
    return Matrix(24.0 * q / (r2 * r2) * d * d.transpose() - 6.0 * q * q / r2 * Matrix::Identity(n, n));
  }
  double line_support_end(const Point& x, const Vector& xi) const override {
    const Vector d = x - c_;
    const double b = xi.dot(d);
    const double disc = b * b - (d.squaredNorm() - r_ * r_);
    if (disc <= 0) return 0.0;
    return std::abs(b) + std::sqrt(disc);
  }
  std::vector<double> line_breakpoints(const Point& x, const Vector& xi) const override {
    const Vector d = x - c_;
    const double b = xi.dot(d);
    const double disc = b * b - (d.squaredNorm() - r_ * r_);
    if (disc <= 0) return {};
    std::vector<double> out;
    for (double t : {-b - std::sqrt(disc), -b + std::sqrt(disc)})
      if (t != 0.0) out.push_back(std::abs(t));
    std::sort(out.begin(), out.end());
    return out;
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "poly bump center=" << vec_str(c_) << " radius=" << r_;
    return os.str();
  }

 private:
  Point c_;
  double r_;
};

class TiltedBump final : public ScalarField {
 public:
  TiltedBump(Point center, Vector slope, double width) : c_(std::move(center)), a_(std::move(slope)), w_(width) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  double value(const Point& y) const override {
    const Vector d = y - c_;
    return a_.dot(d) * std::exp(-d.squaredNorm() / (w_ * w_));
  }
  double sup_bound() const override { return a_.norm() * w_ / std::sqrt(2.0 * std::exp(1.0)); }
  double lipschitz() const override { return a_.norm() * 2.0 / std::sqrt(std::exp(1.0)); }
  double c2_radius(const Point&) const override { return kInf; }
  std::optional<Vector> gradient(const Point& y) const override {
    const Vector d = y - c_;
    const double g = std::exp(-d.squaredNorm() / (w_ * w_));
    return Vector(g * (a_ - 2.0 * a_.dot(d) / (w_ * w_) * d));
  }
  std::optional<Matrix> hessian(const Point& y) const override {
    const Vector d = y - c_;
    const double w2 = w_ * w_;
    const double g = std::exp(-d.squaredNorm() / w2);
    const Eigen::Index n = d.size();
    const Matrix cross = a_ * d.transpose() + d * a_.transpose();
    return Matrix(g * (-2.0 / w2 * cross + a_.dot(d) * (4.0 / (w2 * w2) * d * d.transpose() -
                                                        2.0 / w2 * Matrix::Identity(n, n))));
  }
  double far_deviation(const Point& x, const Vector&, double r) const override {
    const double m = r - (x - c_).norm();
    if (m < w_ / std::sqrt(2.0)) return sup_bound();
    return a_.norm() * m * std::exp(-m * m / (w_ * w_));
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "tilted bump center=" << vec_str(c_) << " slope=" << vec_str(a_) << " width=" << w_;
    return os.str();
  }

 private:
  Point c_;
  Vector a_;
  double w_;
};

class SumField final : public ScalarField {
 public:
  SumField(std::vector<double> w, std::vector<FieldPtr> f) : w_(std::move(w)), f_(std::move(f)) {}
  int dim() const override { return f_.front()->dim(); }
  double value(const Point& y) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) s += w_[i] * f_[i]->value(y);
    return s;
  }
  double sup_bound() const override {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) s += std::abs(w_[i]) * f_[i]->sup_bound();
    return s;
  }
  double lipschitz() const override {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) s += std::abs(w_[i]) * f_[i]->lipschitz();
    return s;
  }
  bool nonnegative() const override {
    for (std::size_t i = 0; i < f_.size(); ++i)
      if (w_[i] < 0 || !f_[i]->nonnegative()) return false;
    return true;
  }
  double c2_radius(const Point& y) const override {
    double r = kInf;
    for (const auto& f : f_) r = std::min(r, f->c2_radius(y));
    return r;
  }
  std::optional<Vector> gradient(const Point& y) const override {
    Vector g = Vector::Zero(dim());
    for (std::size_t i = 0; i < f_.size(); ++i) {
      auto gi = f_[i]->gradient(y);
      if (!gi) return std::nullopt;
      g += w_[i] * *gi;
    }
    return g;
  }
  std::optional<Matrix> hessian(const Point& y) const override {
    Matrix h = Matrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < f_.size(); ++i) {
      auto hi = f_[i]->hessian(y);
      if (!hi) return std::nullopt;
      h += w_[i] * *hi;
    }
    return h;
  }
  double far_limit(const Point& x, const Vector& xi) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) s += w_[i] * f_[i]->far_limit(x, xi);
    return s;
  }
  double line_support_end(const Point& x, const Vector& xi) const override {
    double e = 0.0;
    for (const auto& f : f_) e = std::max(e, f->line_support_end(x, xi));
    return e;
  }
  double far_deviation(const Point& x, const Vector& xi, double r) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < f_.size(); ++i) s += std::abs(w_[i]) * f_[i]->far_deviation(x, xi, r);
    return s;
  }
  std::vector<double> line_breakpoints(const Point& x, const Vector& xi) const override {
    std::vector<double> out;
    for (const auto& f : f_) {
      auto b = f->line_breakpoints(x, xi);
      out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << "sum[";
    for (std::size_t i = 0; i < f_.size(); ++i) os << (i ? " + " : "") << w_[i] << "*(" << f_[i]->describe() << ')';
    os << ']';
    return os.str();
  }

 private:
  std::vector<double> w_;
  std::vector<FieldPtr> f_;
};

class AffinePullback final : public ScalarField {
 public:
  AffinePullback(FieldPtr u, Matrix m, Vector t) : u_(std::move(u)), m_(std::move(m)), t_(std::move(t)) {
    Eigen::JacobiSVD<Matrix> svd(m_);
    norm_ = svd.singularValues()[0];
  }
  int dim() const override { return u_->dim(); }
  double value(const Point& y) const override { return u_->value(map(y)); }
  double sup_bound() const override { return u_->sup_bound(); }
  double lipschitz() const override { return u_->lipschitz() * norm_; }
  bool nonnegative() const override { return u_->nonnegative(); }
  double c2_radius(const Point& y) const override { return u_->c2_radius(map(y)) / norm_; }
  std::optional<Vector> gradient(const Point& y) const override {
    auto g = u_->gradient(map(y));
    if (!g) return std::nullopt;
    return Vector(m_.transpose() * *g);
  }
  std::optional<Matrix> hessian(const Point& y) const override {
    auto h = u_->hessian(map(y));
    if (!h) return std::nullopt;
    return Matrix(m_.transpose() * *h * m_);
  }
  double far_limit(const Point& x, const Vector& xi) const override {
    const Vector mx = m_ * xi;
    return u_->far_limit(map(x), mx / mx.norm());
  }
  double line_support_end(const Point& x, const Vector& xi) const override {
    const Vector mx = m_ * xi;
    const double len = mx.norm();
    return u_->line_support_end(map(x), mx / len) / len;
  }
  double far_deviation(const Point& x, const Vector& xi, double r) const override {
    const Vector mx = m_ * xi;
    const double len = mx.norm();
    return u_->far_deviation(map(x), mx / len, r * len);
  }
  std::vector<double> line_breakpoints(const Point& x, const Vector& xi) const override {
    const Vector mx = m_ * xi;
    const double len = mx.norm();
    auto b = u_->line_breakpoints(map(x), mx / len);
    for (auto& t : b) t /= len;
    return b;
  }
  std::string describe() const override { return "pullback of " + u_->describe(); }

 private:
  Point map(const Point& y) const { return m_ * y + t_; }
  FieldPtr u_;
  Matrix m_;
  Vector t_;
  double norm_ = 1.0;
};

void require_center(const Point& c) {
  if (c.size() < 1) throw Error(ErrorKind::InvalidDimension, "field dimension must be >= 1");
  if (!c.allFinite()) throw Error(ErrorKind::ValidationError, "field center must be finite");
}

// Half the shortest finite side of the extent box bounds the inradius, hence the distance.
double distance_sup(const CsgSet& set) {
  const AxisBox b = extent_box(set);
  double best = kInf;
  for (Eigen::Index i = 0; i < b.lo.size(); ++i) {
    const double side = b.hi[i] - b.lo[i];
    if (std::isfinite(side)) best = std::min(best, 0.5 * std::max(side, 0.0));
  }
  return best;
}

}  // namespace

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C2Near: return "C2_near";
    case Smoothness::Lipschitz: return "Lipschitz";
    case Smoothness::LscOnly: return "LSC_only";
  }
  return "LSC_only";
}

Smoothness ScalarField::smoothness(const Point& y) const {
  if (c2_radius(y) > 0.0) return Smoothness::C2Near;
  if (std::isfinite(lipschitz())) return Smoothness::Lipschitz;
  return Smoothness::LscOnly;
}

double ScalarField::far_deviation(const Point& x, const Vector& xi, double) const {
  return sup_bound() + std::abs(far_limit(x, xi));
}

FieldPtr indicator_field(CsgSet set) { return std::make_shared<IndicatorField>(std::move(set)); }

FieldPtr distance_field(CsgSet set, bool allow_unbounded) {
  const double sup = distance_sup(set);
  if (!std::isfinite(sup) && !allow_unbounded)
    throw Error(ErrorKind::UnboundedSet, "distance field of an unbounded set has no sup bound; truncate it");
  return std::make_shared<DistanceField>(std::move(set), false, sup);
}

FieldPtr truncated_distance_field(CsgSet set) {
  const double sup = std::min(1.0, distance_sup(set));
  return std::make_shared<DistanceField>(std::move(set), true, sup);
}

FieldPtr gaussian_bump(Point center, double width) {
  require_center(center);
  if (!(width > 0.0) || !std::isfinite(width)) throw Error(ErrorKind::ValidationError, "bump width must be > 0");
  const Eigen::Index n = center.size();
  return std::make_shared<AnisotropicBump>(std::move(center), Matrix::Identity(n, n) / (width * width));
}

FieldPtr anisotropic_bump(Point center, Matrix a) {
  require_center(center);
  if (a.rows() != center.size() || a.cols() != center.size())
    throw Error(ErrorKind::DimensionMismatch, "bump matrix dimension");
  if (!a.isApprox(a.transpose(), 1e-14)) throw Error(ErrorKind::ValidationError, "bump matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw Error(ErrorKind::ValidationError, "bump matrix must be positive definite");
  return std::make_shared<AnisotropicBump>(std::move(center), std::move(a));
}

FieldPtr getoor_profile(double s, int n, int axis) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::OutOfRange, "s must lie in (0,1)");
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  if (axis < 0 || axis >= n) throw Error(ErrorKind::InvalidDimension, "axis out of range");
  return std::make_shared<GetoorProfile>(s, n, axis);
}

FieldPtr constant_field(int n, double c) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  if (!std::isfinite(c)) throw Error(ErrorKind::ValidationError, "constant must be finite");
  return std::make_shared<ConstantField>(n, c);
}

FieldPtr poly_bump(Point center, double radius) {
  require_center(center);
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorKind::ValidationError, "bump radius must be > 0");
  return std::make_shared<PolyBump>(std::move(center), radius);
}

FieldPtr tilted_bump(Point center, Vector slope, double width) {
  require_center(center);
  if (slope.size() != center.size()) throw Error(ErrorKind::DimensionMismatch, "slope dimension");
  if (!(width > 0.0) || !std::isfinite(width)) throw Error(ErrorKind::ValidationError, "bump width must be > 0");
  return std::make_shared<TiltedBump>(std::move(center), std::move(slope), width);
}

FieldPtr sum_field(std::vector<double> weights, std::vector<FieldPtr> fields) {
  if (fields.empty() || weights.size() != fields.size())
    throw Error(ErrorKind::ValidationError, "sum needs matching nonempty weights and fields");
  for (const auto& f : fields)
    if (f->dim() != fields.front()->dim()) throw Error(ErrorKind::DimensionMismatch, "summand dimensions differ");
  return std::make_shared<SumField>(std::move(weights), std::move(fields));
}

FieldPtr affine_pullback(FieldPtr u, Matrix m, Vector t) {
  const int n = u->dim();
  if (m.rows() != n || m.cols() != n || t.size() != n) throw Error(ErrorKind::DimensionMismatch, "pullback map");
  if (std::abs(m.determinant()) < 1e-12) throw Error(ErrorKind::DegenerateInput, "pullback map must be invertible");
  return std::make_shared<AffinePullback>(std::move(u), std::move(m), std::move(t));
}

LineRestriction restrict_to_line(const ScalarField& u, const Point& x, const UnitDirection& xi) {
  require_point(u, x);
  if (xi.dim() != u.dim()) throw Error(ErrorKind::DimensionMismatch, "direction dimension differs from field");
  LineRestriction r;
  r.base = u.value(x);
  r.smoothness = u.smoothness(x);
  if (const CsgSet* set = u.indicator_set()) r.indicator = line_intersection_intervals(*set, x, xi);
  const Point x0 = x;
  const Vector d = xi.coords();
  r.eval = [&u, x0, d](double t) { return u.value(Point(x0 + t * d)); };
  return r;
}

}  // namespace fraclab
