#include "fraclab/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

namespace {

constexpr double kPenaltyCap = 1e3;

double deg2rad(double d) { return d * M_PI / 180.0; }

// Angular cell of line directions. N = 3: theta in [t0, t1] from e3, phi in [p0, p1];
// N = 2: angle in [t0, t1] (p0 = p1 = 0).
struct DirCell {
  double t0, t1, p0, p1;
  int n;

  Vector center() const {
    const double t = 0.5 * (t0 + t1);
    Vector d(n);
    if (n == 2) {
      d << std::cos(t), std::sin(t);
    } else {
      const double p = 0.5 * (p0 + p1);
      d << std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t);
    }
    return d;
  }
  /// Every direction in the cell lies within this angle of center().
  double radius() const {
    if (n == 2) return 0.5 * (t1 - t0);
    return 0.5 * (t1 - t0) + std::sin(std::min(t1, 0.5 * M_PI)) * 0.5 * (p1 - p0);
  }
  std::vector<DirCell> split() const {
    const double tm = 0.5 * (t0 + t1);
    if (n == 2) return {{t0, tm, 0, 0, 2}, {tm, t1, 0, 0, 2}};
    const double pm = 0.5 * (p0 + p1);
    return {{t0, tm, p0, pm, 3}, {t0, tm, pm, p1, 3}, {tm, t1, p0, pm, 3}, {tm, t1, pm, p1, 3}};
  }
};

std::vector<DirCell> direction_cells(int n, double res) {
  std::vector<DirCell> cells;
  if (n == 2) {
    const int m = std::max(1, static_cast<int>(std::ceil(M_PI / res)));
    for (int j = 0; j < m; ++j) cells.push_back({M_PI * j / m, M_PI * (j + 1) / m, 0, 0, 2});
  } else {
    const int mt = std::max(1, static_cast<int>(std::ceil(0.5 * M_PI / res)));
    const int mp = std::max(1, static_cast<int>(std::ceil(2.0 * M_PI / res)));
    for (int a = 0; a < mt; ++a)
      for (int b = 0; b < mp; ++b)
        cells.push_back({0.5 * M_PI * a / mt, 0.5 * M_PI * (a + 1) / mt, 2.0 * M_PI * b / mp,
                         2.0 * M_PI * (b + 1) / mp, 3});
  }
  return cells;
}

struct Robust {
  bool hit = false;
  Point point;
};

// Certifies that every line through x with direction within angle r of d meets U.
Robust robust_line_hit(const CsgSet& u, const Point& x, const Vector& d, double r) {
  const IntervalList iv = line_intersection_intervals(u, x, d);
  Robust best;
  for (const auto& piece : iv.pieces()) {
    double lo = piece.lo, hi = piece.hi;
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      lo = -1.0;
      hi = 1.0;
    } else if (!std::isfinite(lo)) {
      lo = hi - 10.0 * (1.0 + std::abs(hi));
    } else if (!std::isfinite(hi)) {
      hi = lo + 10.0 * (1.0 + std::abs(lo));
    }
    constexpr int kSamples = 9;
    for (int j = 0; j < kSamples; ++j) {
      const double t = lo + (hi - lo) * (j + 0.5) / kSamples;
      const Point p = x + t * d;
      if (depth_lower_bound(u, p) > std::abs(t) * r) return {true, p};
    }
  }
  return best;
}

// Moves p inside x + span(q) to raise depth(p) - r |p - x|; returns the best margin and point.
std::pair<double, Point> deepen(const CsgSet& u, const Point& x, const Matrix& q, const Point& p, double r) {
  Vector c = q.transpose() * (p - x);
  auto margin = [&](const Vector& cc) { return depth_lower_bound(u, x + q * cc) - r * cc.norm(); };
  double best = margin(c);
  double step = 0.25;
  for (int iter = 0; iter < 200 && step > 1e-4; ++iter) {
    bool moved = false;
    for (Eigen::Index i = 0; i < c.size() && !moved; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector cc = c;
        cc[i] += sign * step;
        const double m = margin(cc);
        if (m > best) {
          best = m;
          c = cc;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return {best, Point(x + q * c)};
}

double line_penalty(const CsgSet& u, const Point& x, const Vector& d) {
  return line_intersection_intervals(u, x, d).measure(kPenaltyCap);
}

// Lexicographically ordered k-subsets of {0..n-1}, at most `limit` of them.
std::vector<std::vector<int>> axis_subsets(int n, int k, std::size_t limit) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (out.size() < limit) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

Matrix axis_matrix(int n, const std::vector<int>& axes) {
  Matrix q = Matrix::Zero(n, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t i = 0; i < axes.size(); ++i) q(axes[i], static_cast<Eigen::Index>(i)) = 1.0;
  return q;
}

// Penalty pattern search over frames; returns an avoiding frame when the penalty reaches zero.
std::optional<Frame> penalty_search(const CsgSet& u, const Point& x, int k, const OptimizerConfig& opt, Matrix b) {
  const auto n = b.rows();
  std::vector<double> pen(static_cast<std::size_t>(k));
  double total = 0.0;
  for (int i = 0; i < k; ++i) total += pen[static_cast<std::size_t>(i)] = line_penalty(u, x, b.col(i));
  auto rotate = [](Matrix& m, Eigen::Index i, Eigen::Index j, double a) {
    const Vector bi = m.col(i), bj = m.col(j);
    m.col(i) = std::cos(a) * bi + std::sin(a) * bj;
    m.col(j) = -std::sin(a) * bi + std::cos(a) * bj;
  };
  double step = opt.initial_step;
  int iters = 0;
  while (total > 0.0 && step >= opt.tol && iters < opt.max_iters) {
    bool improved = false;
    for (int i = 0; i < k && !improved; ++i) {
      for (Eigen::Index j = i + 1; j < n && !improved; ++j) {
        for (double sign : {1.0, -1.0}) {
          Matrix c = b;
          rotate(c, i, j, sign * step);
          const double pi = line_penalty(u, x, c.col(i));
          double cand = total - pen[static_cast<std::size_t>(i)] + pi;
          double pj = 0.0;
          if (j < k) {
            pj = line_penalty(u, x, c.col(j));
            cand += pj - pen[static_cast<std::size_t>(j)];
          }
          if (cand < total) {
            b = c;
            pen[static_cast<std::size_t>(i)] = pi;
            if (j < k) pen[static_cast<std::size_t>(j)] = pj;
            total = cand;
            improved = true;
            ++iters;
            break;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  const Frame f = orthonormalize(b.leftCols(k));
  if (frame_avoids(u, x, f)) return f;
  return std::nullopt;
}

enum class CellState { Avoided, Refuted, Unresolved };

struct CellResult {
  CellState state = CellState::Unresolved;
  std::optional<Frame> frame;
  std::optional<Subspace> subspace;
  std::optional<Point> point;
  int cells = 0;
};

// Frames (a, b[, a x b]) with a in the direction cell and b at angle psi in [s0, s1] on a-perp (N = 3).
CellResult frame_cell_3d(const CsgSet& u, const Point& x, int k, const DirCell& cell, double s0, double s1,
                         int levels) {
  CellResult out;
  const Vector a = cell.center();
  const double r1 = cell.radius();
  if (auto h = robust_line_hit(u, x, a, r1); h.hit) return {CellState::Refuted, {}, {}, h.point, 1};
  if (k == 1) {
    if (line_avoids(u, x, UnitDirection(a))) return {CellState::Avoided, Frame::from_orthonormal(Matrix(a)), {}, {}, 0};
  } else {
    const Matrix pq = complement_basis(a);
    const double psi = 0.5 * (s0 + s1);
    const Vector b = std::cos(psi) * pq.col(0) + std::sin(psi) * pq.col(1);
    const Vector c = Eigen::Vector3d(a).cross(Eigen::Vector3d(b));
    const double r2 = r1 + 0.5 * (s1 - s0);
    if (auto h = robust_line_hit(u, x, b, r2); h.hit) return {CellState::Refuted, {}, {}, h.point, 1};
    if (k == 3) {
      if (auto h = robust_line_hit(u, x, c, r2); h.hit) return {CellState::Refuted, {}, {}, h.point, 1};
    }
    Matrix w(3, k);
    w.col(0) = a;
    w.col(1) = b;
    if (k == 3) w.col(2) = c;
    const Frame f = orthonormalize(w);
    if (frame_avoids(u, x, f)) return {CellState::Avoided, f, {}, {}, 0};
  }
  if (levels == 0) return out;
  const double sm = 0.5 * (s0 + s1);
  std::optional<Point> witness_point;
  bool unresolved = false;
  for (const DirCell& child : cell.split()) {
    std::vector<std::pair<double, double>> psis = {{s0, s1}};
    if (k > 1) psis = {{s0, sm}, {sm, s1}};
    for (const auto& [c0, c1] : psis) {
      CellResult r = frame_cell_3d(u, x, k, child, c0, c1, levels - 1);
      out.cells += r.cells;
      if (r.state == CellState::Avoided) return r;
      if (r.state == CellState::Unresolved) unresolved = true;
      else if (!witness_point) witness_point = r.point;
    }
  }
  out.state = unresolved ? CellState::Unresolved : CellState::Refuted;
  out.point = witness_point;
  return out;
}

CellResult frame_cell_2d(const CsgSet& u, const Point& x, int k, const DirCell& cell, int levels) {
  CellResult out;
  const Vector a = cell.center();
  const double r = cell.radius();
  Vector b(2);
  b << -a[1], a[0];
  if (auto h = robust_line_hit(u, x, a, r); h.hit) return {CellState::Refuted, {}, {}, h.point, 1};
  if (k == 2) {
    if (auto h = robust_line_hit(u, x, b, r); h.hit) return {CellState::Refuted, {}, {}, h.point, 1};
  }
  Matrix w(2, k);
  w.col(0) = a;
  if (k == 2) w.col(1) = b;
  const Frame f = orthonormalize(w);
  if (frame_avoids(u, x, f)) return {CellState::Avoided, f, {}, {}, 0};
  if (levels == 0) return out;
  bool unresolved = false;
  for (const DirCell& child : cell.split()) {
    CellResult rr = frame_cell_2d(u, x, k, child, levels - 1);
    out.cells += rr.cells;
    if (rr.state == CellState::Avoided) return rr;
    if (rr.state == CellState::Unresolved) unresolved = true;
    else if (!out.point) out.point = rr.point;
  }
  out.state = unresolved ? CellState::Unresolved : CellState::Refuted;
  return out;
}

// Subspace cells: k = 1 uses the direction as V; k = N - 1 uses it as the normal of V.
CellResult subspace_cell(const CsgSet& u, const Point& x, int k, const DirCell& cell, int levels) {
  CellResult out;
  const Vector d = cell.center();
  const double r = cell.radius();
  const int n = static_cast<int>(x.size());
  const Matrix q = k == 1 ? Matrix(d) : complement_basis(d);
  (void)n;
  const Subspace v(Frame::from_orthonormal(q));
  const AffineAvoidance dec = decide_affine_avoidance(u, x, v);
  if (dec.status == Avoidance::Avoids) return {CellState::Avoided, {}, v, {}, 0};
  if (dec.status == Avoidance::Meets) {
    // Seeds: the located hit and the projections of every primitive anchor onto x + V.
    std::vector<Point> seeds;
    if (dec.hit) seeds.push_back(*dec.hit);
    for (const LeafRef& leaf : leaves(u)) {
      if (leaf.negated) continue;
      std::optional<Point> anchor;
      if (const auto* b = std::get_if<Ball>(&leaf.node->kind)) anchor = b->center;
      else if (const auto* c = std::get_if<Cylinder>(&leaf.node->kind)) anchor = c->point;
      else if (const auto* bx = std::get_if<Box>(&leaf.node->kind)) anchor = Point(0.5 * (bx->lo + bx->hi));
      if (anchor) seeds.emplace_back(x + q * (q.transpose() * (*anchor - x)));
    }
    for (const Point& seed : seeds) {
      auto [margin, p] = deepen(u, x, q, seed, r);
      if (margin > 0.0) return {CellState::Refuted, {}, v, p, 1};
    }
  }
  if (levels == 0) return out;
  bool unresolved = false;
  for (const DirCell& child : cell.split()) {
    CellResult rr = subspace_cell(u, x, k, child, levels - 1);
    out.cells += rr.cells;
    if (rr.state == CellState::Avoided) return rr;
    if (rr.state == CellState::Unresolved) unresolved = true;
    else if (!out.point) {
      out.point = rr.point;
      out.subspace = rr.subspace;
    }
  }
  out.state = unresolved ? CellState::Unresolved : CellState::Refuted;
  return out;
}

struct GridOutcome {
  CellResult merged;
  int total_cells = 0;
};

GridOutcome merge_cells(std::vector<CellResult>& results) {
  GridOutcome g;
  bool unresolved = false;
  std::optional<std::size_t> first_refuted;
  for (std::size_t i = 0; i < results.size(); ++i) {
    g.total_cells += results[i].cells;
    if (results[i].state == CellState::Avoided) {
      g.merged = results[i];
      return g;
    }
    if (results[i].state == CellState::Unresolved) unresolved = true;
    else if (!first_refuted) first_refuted = i;
  }
  if (unresolved) {
    g.merged.state = CellState::Unresolved;
  } else {
    g.merged = results[first_refuted.value_or(0)];
    g.merged.state = CellState::Refuted;
  }
  return g;
}

void require_point(const CsgSet& u, const Point& x, int k) {
  if (x.size() != u.dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from scene");
  if (k < 1 || k > u.dim()) throw Error(ErrorKind::InvalidDimension, "k must lie in [1, N]");
  if (contains(u, x)) throw Error(ErrorKind::PointInsideU, "query point lies in U");
}

// Outward unit normal of a ball leaf whose boundary passes through x.
std::optional<Vector> ball_boundary_normal(const CsgSet& u, const Point& x) {
  for (const LeafRef& leaf : leaves(u)) {
    if (leaf.negated) continue;
    if (const auto* b = std::get_if<Ball>(&leaf.node->kind)) {
      const Vector d = x - b->center;
      if (std::abs(d.norm() - b->radius) <= 1e-9 * (1.0 + b->radius)) return Vector(d.normalized());
    }
  }
  return std::nullopt;
}

}  // namespace

bool frame_avoids(const CsgSet& u, const Point& x, const Frame& f) {
  for (int i = 0; i < f.size(); ++i)
    if (!line_avoids(u, x, f.direction(i))) return false;
  return true;
}

PredicateVerdict check_G(const CsgSet& u, const CsgSet& omega, int k, const Point& x, const PredicateSearch& search) {
  require_point(u, x, k);
  if (!contains(omega, x)) throw Error(ErrorKind::PointOutsideOmega, "query point lies outside Omega");
  search.opt.validate();
  const int n = u.dim();
  PredicateVerdict v;
  v.resolution = search.resolution_deg;
  auto holds = [&](const Frame& f, const std::string& how) {
    v.status = VerdictStatus::Holds;
    v.frame = f;
    v.detail = how;
    return v;
  };
  for (const auto& axes : axis_subsets(n, k, 256)) {
    const Frame f = Frame::from_orthonormal(axis_matrix(n, axes));
    if (frame_avoids(u, x, f)) return holds(f, "coordinate frame");
  }
  // Frames inside the tangent hyperplane of each round primitive through x.
  if (k < n) {
    for (const LeafRef& leaf : leaves(u)) {
      if (leaf.negated) continue;
      Vector normal;
      if (const auto* b = std::get_if<Ball>(&leaf.node->kind)) normal = x - b->center;
      else if (const auto* c = std::get_if<Cylinder>(&leaf.node->kind)) {
        const Vector d = x - c->point;
        normal = d - c->axis * c->axis.dot(d);
      } else continue;
      if (normal.norm() == 0.0) continue;
      Matrix q = complement_basis(Matrix(normal.normalized()));
      const int turns = q.cols() >= 2 ? 32 : 1;
      for (int j = 0; j < turns; ++j) {
        Matrix r = q;
        if (q.cols() >= 2) {
          const double t = M_PI * j / turns;
          r.col(0) = std::cos(t) * q.col(0) + std::sin(t) * q.col(1);
          r.col(1) = -std::sin(t) * q.col(0) + std::cos(t) * q.col(1);
        }
        const Frame f = Frame::from_orthonormal(r.leftCols(k));
        if (frame_avoids(u, x, f)) return holds(f, "tangent frame");
      }
    }
  }
  {
    std::vector<Matrix> inits;
    inits.push_back(Matrix::Identity(n, n));
    for (int r = 1; r < search.opt.restarts; ++r) {
      const Matrix q = random_frame(n, k, search.opt.seed + static_cast<std::uint64_t>(r)).matrix();
      Matrix b(n, n);
      b.leftCols(k) = q;
      if (k < n) b.rightCols(n - k) = complement_basis(q);
      inits.push_back(b);
    }
    std::vector<std::optional<Frame>> found(inits.size());
    parallel_for(inits.size(), search.opt.exec,
                 [&](std::size_t i) { found[i] = penalty_search(u, x, k, search.opt, inits[i]); });
    for (const auto& f : found)
      if (f) return holds(*f, "penalty search");
  }
  if (n == 1) {
    v.status = VerdictStatus::Fails;
    v.certificate = robust_line_hit(u, x, Vector::Ones(1), 0.0).point;
    v.detail = "the only line meets U";
    return v;
  }
  if (n > 3) {
    v.detail = "no frame found; exhaustive refutation needs N <= 3";
    return v;
  }
  const double res = deg2rad(search.resolution_deg);
  const std::vector<DirCell> cells = direction_cells(n, res);
  const int mpsi = std::max(1, static_cast<int>(std::ceil(M_PI / res)));
  const std::size_t per = (n == 3 && k > 1) ? static_cast<std::size_t>(mpsi) : 1;
  std::vector<CellResult> results(cells.size() * per);
  parallel_for(cells.size(), search.opt.exec, [&](std::size_t i) {
    if (n == 2) {
      results[i] = frame_cell_2d(u, x, k, cells[i], search.refine_levels);
      return;
    }
    for (std::size_t j = 0; j < per; ++j) {
      const double s0 = M_PI * static_cast<double>(j) / mpsi, s1 = M_PI * static_cast<double>(j + 1) / mpsi;
      results[i * per + j] = frame_cell_3d(u, x, k, cells[i], s0, s1, search.refine_levels);
      if (results[i * per + j].state == CellState::Avoided) break;
    }
  });
  GridOutcome g = merge_cells(results);
  v.cells = g.total_cells;
  if (g.merged.state == CellState::Avoided) return holds(*g.merged.frame, "grid frame");
  if (g.merged.state == CellState::Refuted) {
    v.status = VerdictStatus::Fails;
    v.certificate = g.merged.point;
    v.detail = "every frame cell has a line certified to meet U";
    return v;
  }
  v.detail = "no frame found and some grid cells were not refuted";
  return v;
}

PredicateVerdict check_G_affine(const CsgSet& u, int k, const Point& x, const PredicateSearch& search) {
  require_point(u, x, k);
  search.opt.validate();
  const int n = u.dim();
  PredicateVerdict v;
  v.resolution = search.resolution_deg;
  auto holds = [&](const Subspace& s, const std::string& how) {
    v.status = VerdictStatus::Holds;
    v.subspace = s;
    v.detail = how;
    return v;
  };
  bool undecided = false;
  for (const auto& axes : axis_subsets(n, k, 256)) {
    const Subspace s(Frame::from_orthonormal(axis_matrix(n, axes)));
    const AffineAvoidance d = decide_affine_avoidance(u, x, s);
    if (d.status == Avoidance::Avoids) return holds(s, "coordinate subspace");
    if (d.status == Avoidance::Unknown) undecided = true;
  }
  if (k == n) {
    // x + V is the whole space: it meets U unless U is empty.
    const Subspace s(Frame::identity(n, n));
    if (auto hit = find_affine_hit(u, x, s)) {
      v.status = VerdictStatus::Fails;
      v.certificate = hit;
      v.subspace = s;
      v.detail = "the whole space meets U";
    } else {
      v.detail = undecided ? "undecidable primitive" : "no point of U located";
    }
    return v;
  }
  for (int r = 0; r < search.opt.restarts; ++r) {
    const Subspace s(random_frame(n, k, search.opt.seed + static_cast<std::uint64_t>(r)));
    if (decide_affine_avoidance(u, x, s).status == Avoidance::Avoids) return holds(s, "random subspace");
  }
  const bool gridable = n == 2 || (n == 3 && (k == 1 || k == 2));
  if (!gridable) {
    v.detail = "no subspace found; exhaustive refutation needs N <= 3";
    return v;
  }
  const double res = deg2rad(search.resolution_deg);
  const std::vector<DirCell> cells = direction_cells(n, res);
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), search.opt.exec,
               [&](std::size_t i) { results[i] = subspace_cell(u, x, k, cells[i], search.refine_levels); });
  GridOutcome g = merge_cells(results);
  v.cells = g.total_cells;
  if (g.merged.state == CellState::Avoided) return holds(*g.merged.subspace, "grid subspace");
  if (g.merged.state == CellState::Unresolved) {
    v.detail = "no subspace found and some grid cells were not refuted";
    return v;
  }
  v.status = VerdictStatus::Fails;
  v.certificate = g.merged.point;
  v.subspace = g.merged.subspace;
  v.detail = "every subspace cell certified to meet U";
  if (k == n - 1) {
    if (auto normal = ball_boundary_normal(u, x)) {
      const Subspace tangent(Frame::from_orthonormal(complement_basis(*normal)));
      if (auto hit = find_affine_hit(u, x, tangent); hit && contains(u, *hit)) {
        v.certificate = hit;
        v.subspace = tangent;
        v.detail += "; certificate on the tangent plane";
      }
    }
  }
  return v;
}

PredicateVerdict check_convex_components(const CsgSet& u, const AxisBox& box, double h, int m) {
  const std::vector<Component> comps = connected_components(u, box, h);
  PredicateVerdict out;
  out.status = VerdictStatus::Holds;
  out.resolution = h;
  out.detail = std::to_string(comps.size()) + " components";
  for (std::size_t i = 0; i < comps.size(); ++i) {
    PredicateVerdict v = is_component_convex(comps[i], u, m);
    if (v.status == VerdictStatus::Fails) {
      v.detail = "component " + std::to_string(i) + ": " + v.detail;
      v.resolution = h;
      return v;
    }
    if (v.status == VerdictStatus::Inconclusive) out.status = VerdictStatus::Inconclusive;
  }
  return out;
}

}  // namespace fraclab
