#include "fraclab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fraclab/errors.hpp"

#ifdef FRACLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace fraclab {

bool parallel_available() {
#ifdef FRACLAB_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef FRACLAB_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool improves(double candidate, double current) {
  return candidate < current - 1e-14 * (1.0 + std::abs(current));
}

// Full orthonormal basis whose leading columns are q.
Matrix full_basis(const Matrix& q) {
  const auto n = q.rows();
  const auto k = q.cols();
  Matrix b(n, n);
  b.leftCols(k) = q;
  if (k < n) b.rightCols(n - k) = complement_basis(q);
  return b;
}

void givens(Matrix& b, Eigen::Index i, Eigen::Index j, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vector bi = b.col(i);
  const Vector bj = b.col(j);
  b.col(i) = c * bi + s * bj;
  b.col(j) = -s * bi + c * bj;
}

void reorthonormalize(Matrix& b) {
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) b.col(j) -= b.col(i).dot(b.col(j)) * b.col(i);
    b.col(j).normalize();
  }
}

OperatorValue directional(const ScalarField& u, const Point& x, const Vector& dir, double s,
                          const QuadratureSpec& spec) {
  return eval_directional(u, x, UnitDirection(dir), s, spec);
}

struct Candidate {
  OperatorValue value;
  Matrix key;  // canonical representation for tie-breaking
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value.value != b.value.value) return a.value.value < b.value.value;
  return lexicographic_less(a.key, b.key);
}

// Pattern search on the Stiefel manifold from the basis b (first k columns are the frame).
Candidate search_frame(const DirectionalFn& f, int k, const OptimizerConfig& opt, Matrix b) {
  const auto n = b.rows();
  std::vector<OperatorValue> vals;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    vals.push_back(f(b.col(i)));
    total += vals.back().value;
  }
  std::vector<std::pair<int, int>> moves;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < n; ++j) moves.emplace_back(i, j);
  double step = opt.initial_step;
  int iters = 0;
  while (step >= opt.tol && iters < opt.max_iters) {
    bool improved = false;
    for (const auto& [i, j] : moves) {
      for (double sign : {1.0, -1.0}) {
        Matrix c = b;
        givens(c, i, j, sign * step);
        OperatorValue vi = f(c.col(i));
        double cand = total - vals[static_cast<std::size_t>(i)].value + vi.value;
        std::optional<OperatorValue> vj;
        if (j < k) {
          vj = f(c.col(j));
          cand += vj->value - vals[static_cast<std::size_t>(j)].value;
        }
        if (improves(cand, total)) {
          reorthonormalize(c);
          b = std::move(c);
          vals[static_cast<std::size_t>(i)] = vi;
          if (vj) vals[static_cast<std::size_t>(j)] = *vj;
          total = cand;
          improved = true;
          ++iters;
          break;
        }
      }
      if (iters >= opt.max_iters) break;
    }
    if (!improved) step *= 0.5;
  }
  // Recompute the sum at the final frame so value and bracket match it exactly.
  const Frame frame = Frame::from_orthonormal(b.leftCols(k));
  Candidate out;
  out.value = f(frame.matrix().col(0));
  for (int i = 1; i < k; ++i) out.value = out.value + f(frame.matrix().col(i));
  out.value.frame = frame;
  out.key = frame.canonical().matrix();
  return out;
}

OperatorValue merge(std::vector<Candidate>& cands) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (better(cands[i], cands[best])) best = i;
  return cands[best].value;
}

void check_point(const ScalarField& u, const Point& x, const FracParams& params) {
  params.validate();
  if (params.n != u.dim() || x.size() != u.dim())
    throw Error(ErrorKind::DimensionMismatch, "point, field and parameter dimensions differ");
}

// Inner sup over the unit sphere of span(q) by restarts plus coordinate pattern search.
OperatorValue sphere_sup(const DirectionalFn& f, const Matrix& q, const OptimizerConfig& opt) {
  const auto k = q.cols();
  auto eval_c = [&](const Vector& c) { return f(q * c); };
  if (k == 1) {
    OperatorValue v = eval_c(Vector::Ones(1));
    v.frame = Frame::from_orthonormal(q);
    return v;
  }
  struct Pt {
    Vector c;
    OperatorValue v;
  };
  std::vector<Pt> pts;
  if (k == 2) {
    const int m = std::max(opt.sphere_points, 8);
    for (int j = 0; j < m; ++j) {
      const double th = M_PI * j / m;
      Vector c(2);
      c << std::cos(th), std::sin(th);
      pts.push_back({c, eval_c(c)});
    }
  } else {
    for (Eigen::Index i = 0; i < k; ++i) {
      const Vector c = Vector::Unit(k, i);
      pts.push_back({c, eval_c(c)});
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < opt.sphere_points; ++j) {
      Vector c(k);
      for (Eigen::Index i = 0; i < k; ++i) c[i] = normal(rng);
      c.normalize();
      pts.push_back({c, eval_c(c)});
    }
  }
  std::stable_sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.v.value > b.v.value; });
  const std::size_t refine = k == 2 ? 1 : std::min<std::size_t>(3, pts.size());
  Pt best = pts.front();
  for (std::size_t r = 0; r < refine; ++r) {
    Pt cur = pts[r];
    double step = k == 2 ? M_PI / std::max(opt.sphere_points, 8) : opt.initial_step;
    int iters = 0;
    while (step >= opt.tol && iters < opt.max_iters) {
      bool improved = false;
      for (Eigen::Index a = 0; a < k && !improved; ++a) {
        for (Eigen::Index bidx = a + 1; bidx < k && !improved; ++bidx) {
          for (double sign : {1.0, -1.0}) {
            Vector c = cur.c;
            const double ca = std::cos(sign * step), sa = std::sin(sign * step);
            // Rotate the point inside the (a, b) coordinate plane.
            const double xa = c[a], xb = c[bidx];
            c[a] = ca * xa - sa * xb;
            c[bidx] = sa * xa + ca * xb;
            c.normalize();
            OperatorValue v = eval_c(c);
            if (improves(-v.value, -cur.v.value)) {
              cur = {c, v};
              improved = true;
              ++iters;
              break;
            }
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur.v.value > best.v.value) best = cur;
  }
  best.v.frame = Frame::from_orthonormal(Matrix((q * best.c).normalized()));
  return best.v;
}

Candidate search_subspace(const DirectionalFn& f, int k, const OptimizerConfig& inner, const OptimizerConfig& opt,
                          Matrix b) {
  const auto n = b.rows();
  OperatorValue cur = sphere_sup(f, b.leftCols(k), inner);
  double step = opt.initial_step;
  int iters = 0;
  while (k < n && step >= opt.tol && iters < opt.max_iters) {
    bool improved = false;
    for (int i = 0; i < k && !improved; ++i) {
      for (Eigen::Index j = k; j < n && !improved; ++j) {
        for (double sign : {1.0, -1.0}) {
          Matrix c = b;
          givens(c, i, j, sign * step);
          OperatorValue v = sphere_sup(f, c.leftCols(k), inner);
          if (improves(v.value, cur.value)) {
            reorthonormalize(c);
            b = std::move(c);
            cur = v;
            improved = true;
            ++iters;
            break;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  const Subspace sub(Frame::from_orthonormal(b.leftCols(k)));
  Candidate out;
  out.value = cur;
  out.value.subspace = sub;
  out.key = sub.projector();
  return out;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1) throw Error(ErrorKind::ValidationError, "restarts must be >= 1");
  if (max_iters < 0) throw Error(ErrorKind::ValidationError, "max_iters must be >= 0");
  if (!(tol > 0.0)) throw Error(ErrorKind::ValidationError, "optimizer tol must be > 0");
  if (!(initial_step > 0.0)) throw Error(ErrorKind::ValidationError, "initial step must be > 0");
  if (sphere_points < 1) throw Error(ErrorKind::ValidationError, "sphere_points must be >= 1");
}

OperatorValue frame_sum(const ScalarField& u, const Point& x, const Frame& f, double s, const QuadratureSpec& spec) {
  if (f.dim() != u.dim()) throw Error(ErrorKind::DimensionMismatch, "frame dimension differs from field");
  OperatorValue total;
  total.note.clear();
  for (int i = 0; i < f.size(); ++i) {
    const OperatorValue v = eval_directional(u, x, f.direction(i), s, spec);
    if (i == 0) total = v; else total = total + v;
  }
  total.frame = f;
  return total;
}

OperatorValue minimize_frame_sum(const DirectionalFn& f, int n, int k, const OptimizerConfig& opt,
                                 const std::vector<Frame>& starts) {
  opt.validate();
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidDimension, "k must lie in [1, N]");
  std::vector<Matrix> inits;
  for (const auto& fr : starts) {
    if (fr.dim() != n || fr.size() != k) throw Error(ErrorKind::DimensionMismatch, "start frame shape");
    inits.push_back(full_basis(fr.matrix()));
  }
  inits.push_back(Matrix::Identity(n, n));
  for (int r = 1; r < opt.restarts; ++r)
    inits.push_back(full_basis(random_frame(n, k, opt.seed + static_cast<std::uint64_t>(r)).matrix()));
  std::vector<Candidate> cands(inits.size());
  parallel_for(inits.size(), opt.exec, [&](std::size_t i) { cands[i] = search_frame(f, k, opt, inits[i]); });
  return merge(cands);
}

OperatorValue minimize_subspace_sup(const DirectionalFn& f, int n, int k, const OptimizerConfig& opt,
                                    const std::vector<Subspace>& starts) {
  opt.validate();
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidDimension, "k must lie in [1, N]");
  std::vector<Matrix> inits;
  for (const auto& v : starts) {
    if (v.ambient_dim() != n || v.dim() != k) throw Error(ErrorKind::DimensionMismatch, "start subspace shape");
    inits.push_back(full_basis(v.basis().matrix()));
  }
  inits.push_back(Matrix::Identity(n, n));
  for (int r = 1; r < opt.restarts && k < n; ++r)
    inits.push_back(full_basis(random_frame(n, k, opt.seed + static_cast<std::uint64_t>(r)).matrix()));
  OptimizerConfig inner = opt;
  inner.exec = Execution::Serial;
  std::vector<Candidate> cands(inits.size());
  parallel_for(inits.size(), opt.exec,
               [&](std::size_t i) { cands[i] = search_subspace(f, k, inner, opt, inits[i]); });
  return merge(cands);
}

OperatorValue eval_truncated(const ScalarField& u, const Point& x, const FracParams& params,
                             const QuadratureSpec& spec, const OptimizerConfig& opt, const std::vector<Frame>& starts) {
  check_point(u, x, params);
  const DirectionalFn f = [&](const Vector& d) { return directional(u, x, d, params.s, spec); };
  OperatorValue v = minimize_frame_sum(f, params.n, params.k, opt, starts);
  v.note = "upper bound of the infimum (best frame found)";
  return v;
}

OperatorValue subspace_sup(const ScalarField& u, const Point& x, const Subspace& v, double s,
                           const QuadratureSpec& spec, const OptimizerConfig& opt) {
  if (v.ambient_dim() != u.dim() || x.size() != u.dim())
    throw Error(ErrorKind::DimensionMismatch, "subspace dimension differs from field");
  const DirectionalFn f = [&](const Vector& d) { return directional(u, x, d, s, spec); };
  OperatorValue r = sphere_sup(f, v.basis().matrix(), opt);
  r.subspace = v;
  r.note = "lower bound of the supremum over the unit sphere of V";
  return r;
}

OperatorValue eval_eigenvalue(const ScalarField& u, const Point& x, const FracParams& params,
                              const QuadratureSpec& spec, const OptimizerConfig& opt,
                              const std::vector<Subspace>& starts) {
  check_point(u, x, params);
  const DirectionalFn f = [&](const Vector& d) { return directional(u, x, d, params.s, spec); };
  OperatorValue v = minimize_subspace_sup(f, params.n, params.k, opt, starts);
  v.note = "inner sup lower bound at the best subspace found (outer inf upper bound)";
  return v;
}

OperatorValue brute_force_oracle(const ScalarField& u, const Point& x, const FracParams& params,
                                 double resolution_deg, OperatorKind kind, const QuadratureSpec& spec,
                                 Execution exec) {
  check_point(u, x, params);
  const int n = params.n, k = params.k;
  if (n > 3) throw Error(ErrorKind::DimensionTooLarge, "brute-force oracle supports N <= 3");
  if (!(resolution_deg > 0.0) || resolution_deg > 90.0)
    throw Error(ErrorKind::ValidationError, "resolution must lie in (0, 90] degrees");
  const double s = params.s;
  const double res = resolution_deg * M_PI / 180.0;
  auto dir = [&](const Vector& d) { return directional(u, x, d, s, spec); };

  // Outer grid elements: lines (N = 2) or hemisphere points (N = 3).
  std::vector<Vector> outer;
  if (n == 1) {
    outer.push_back(Vector::Ones(1));
  } else if (n == 2) {
    const int m = static_cast<int>(std::round(M_PI / res));
    for (int j = 0; j < m; ++j) {
      Vector d(2);
      d << std::cos(j * M_PI / m), std::sin(j * M_PI / m);
      outer.push_back(d);
    }
  } else {
    const int mt = static_cast<int>(std::round(0.5 * M_PI / res));
    const int mp = static_cast<int>(std::round(2.0 * M_PI / res));
    for (int a = 0; a <= mt; ++a) {
      const double th = 0.5 * M_PI * a / mt;
      const int count = a == 0 ? 1 : mp;
      for (int b = 0; b < count; ++b) {
        const double ph = 2.0 * M_PI * b / mp;
        Vector d(3);
        d << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
        outer.push_back(d);
      }
    }
  }
  // Circle parameters for the second direction (N = 3) or the inner sup.
  const int mc = static_cast<int>(std::round(M_PI / res));
  const int mc_fine = 2 * mc;

  std::vector<Candidate> best(outer.size());
  parallel_for(outer.size(), exec, [&](std::size_t idx) {
    const Vector& a = outer[idx];
    Candidate c;
    c.value.value = kInf;
    auto offer = [&](OperatorValue v, const Matrix& key, const Matrix& witness, bool subspace) {
      Candidate cand{v, key};
      if (subspace) cand.value.subspace = Subspace(Frame::from_orthonormal(witness));
      else cand.value.frame = Frame::from_orthonormal(witness);
      if (!std::isfinite(c.value.value) || better(cand, c)) c = cand;
    };
    if (kind == OperatorKind::Truncated || k == 1) {
      if (k == 1) {
        const Matrix w = a;
        offer(dir(a), Frame::from_orthonormal(w).canonical().matrix(), w, false);
      } else if (n == 2) {
        Vector b(2);
        b << -a[1], a[0];
        Matrix w(2, 2);
        w << a, b;
        const OperatorValue v = dir(a) + dir(b);
        offer(v, Frame::from_orthonormal(w).canonical().matrix(), w, false);
      } else {
        const Matrix pq = complement_basis(a);
        const OperatorValue va = dir(a);
        for (int j = 0; j < mc; ++j) {
          const double ps = M_PI * j / mc;
          const Vector b = std::cos(ps) * pq.col(0) + std::sin(ps) * pq.col(1);
          OperatorValue v = va + dir(b);
          Matrix w(3, k);
          w.col(0) = a;
          w.col(1) = b;
          if (k == 3) {
            const Vector c3 = Eigen::Vector3d(a).cross(Eigen::Vector3d(b));
            w.col(2) = c3;
            v = v + dir(c3);
          }
          offer(v, Frame::from_orthonormal(w).canonical().matrix(), w, false);
        }
      }
    } else {
      // Eigenvalue operator with k >= 2: V = a-perp (N = 3, k = 2) or V = R^N (k = N).
      Matrix q;
      if (k == n) {
        q = Matrix::Identity(n, n);
        if (idx != 0) {
          c.value.value = kInf;
          best[idx] = c;
          return;
        }
      } else {
        q = complement_basis(a);
      }
      OperatorValue sup;
      sup.value = -kInf;
      auto consider = [&](const Vector& d) {
        OperatorValue v = dir(d);
        if (v.value > sup.value) sup = v;
      };
      if (q.cols() == 2) {
        for (int j = 0; j < mc_fine; ++j) {
          const double ps = M_PI * j / mc_fine;
          consider(std::cos(ps) * q.col(0) + std::sin(ps) * q.col(1));
        }
      } else {
        for (const auto& d : outer) consider(d);
      }
      offer(sup, Subspace(Frame::from_orthonormal(q)).projector(), q, true);
    }
    best[idx] = c;
  });
  std::vector<Candidate> finite;
  for (auto& c : best)
    if (std::isfinite(c.value.value) || c.value.frame || c.value.subspace) finite.push_back(c);
  OperatorValue v = merge(finite);
  v.note = "grid minimum at " + std::to_string(resolution_deg) + " deg";
  return v;
}

std::pair<double, double> local_limit_reference(const ScalarField& u, const Point& x, int k, double h) {
  const int n = u.dim();
  if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from field");
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidDimension, "k must lie in [1, N]");
  if (u.smoothness(x) != Smoothness::C2Near) throw Error(ErrorKind::NotSmooth, "field is not C^2 near the point");
  if (!(h > 0.0)) h = 1e-4 * (1.0 + x.norm());
  Matrix hess(n, n);
  const double u0 = u.value(x);
  for (int i = 0; i < n; ++i) {
    const Vector ei = h * Vector::Unit(n, i);
    hess(i, i) = (u.value(x + ei) - 2.0 * u0 + u.value(x - ei)) / (h * h);
    for (int j = 0; j < i; ++j) {
      const Vector ej = h * Vector::Unit(n, j);
      hess(i, j) = hess(j, i) = (u.value(x + ei + ej) - u.value(x + ei - ej) - u.value(x - ei + ej) +
                                 u.value(x - ei - ej)) / (4.0 * h * h);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
  const Vector ev = es.eigenvalues();
  return {ev.head(k).sum(), ev[k - 1]};
}

}  // namespace fraclab
