#include "fraclab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclab/errors.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

namespace {

constexpr double kIndicatorTol = 1e-12;
constexpr double kDistanceTol = 1e-6;
constexpr double kMinimumTol = 1e-12;
constexpr double kKinkRadius = 1e-4;
constexpr double kQuotientStep = 1e-5;
constexpr double kQuotientMismatch = 1e-3;

// Unit directions of V: the basis, then a half-circle (dim 2) or seeded sphere points (dim >= 3).
std::vector<Vector> subspace_directions(const Subspace& v, int m, std::uint64_t seed) {
  const Matrix& q = v.basis().matrix();
  const auto k = q.cols();
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < k; ++i) dirs.emplace_back(q.col(i));
  if (k == 2) {
    for (int j = 1; j < m; ++j) {
      const double t = M_PI * j / m;
      dirs.emplace_back(std::cos(t) * q.col(0) + std::sin(t) * q.col(1));
    }
  } else if (k >= 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < m; ++j) {
      Vector c(k);
      for (Eigen::Index i = 0; i < k; ++i) c[i] = normal(rng);
      dirs.emplace_back(q * c.normalized());
    }
  }
  return dirs;
}

// Largest directional value over the direction grid of V.
OperatorValue grid_sup(const std::vector<Vector>& dirs, const std::function<OperatorValue(const Vector&)>& f) {
  OperatorValue best;
  bool first = true;
  for (const auto& d : dirs) {
    OperatorValue v = f(d);
    if (first || v.value > best.value) best = v;
    first = false;
  }
  return best;
}

void fill(SampleRecord& rec, const OperatorValue& v, double tol, const std::string& pathway) {
  rec.value = v.value;
  rec.lo = v.lo;
  rec.hi = v.hi;
  rec.pathway = pathway;
  rec.outcome = v.hi <= tol ? SampleOutcome::Certified : SampleOutcome::Failed;
  if (rec.outcome == SampleOutcome::Failed) rec.detail = "upper bracket exceeds tolerance";
}

// A point of the complement just beyond the projection p, pushed away from x so that lines
// tangent to the boundary at p clear it by a resolvable margin.
std::optional<Point> outside_point(const CsgSet& u, const Point& x, Point p) {
  if ((p - x).norm() > 0.0) p = x + (p - x) * (1.0 + 1e-9);
  for (int i = 0; i < 8 && contains(u, p); ++i) p = x + (p - x) * (1.0 + std::ldexp(1.0, -30 + 3 * i));
  if (contains(u, p)) return std::nullopt;
  return p;
}

bool kink_near(const ScalarField& u, const Point& x) {
  if (u.c2_radius(x) < kKinkRadius) return true;
  const double u0 = u.value(x);
  for (int i = 0; i < u.dim(); ++i) {
    const Vector e = kQuotientStep * Vector::Unit(u.dim(), i);
    const double fwd = (u.value(x + e) - u0) / kQuotientStep;
    const double bwd = (u0 - u.value(x - e)) / kQuotientStep;
    if (std::abs(fwd - bwd) > kQuotientMismatch) return true;
  }
  return false;
}

}  // namespace

std::string to_string(WitnessMode m) { return m == WitnessMode::Frames ? "frames" : "subspaces"; }

std::string to_string(SampleOutcome o) {
  switch (o) {
    case SampleOutcome::Certified: return "certified";
    case SampleOutcome::Skipped: return "skipped";
    case SampleOutcome::Failed: return "failed";
  }
  return "unknown";
}

void VerificationReport::tally() {
  certified = skipped = failed = 0;
  for (const auto& s : samples) {
    if (s.outcome == SampleOutcome::Certified) ++certified;
    else if (s.outcome == SampleOutcome::Skipped) ++skipped;
    else ++failed;
  }
}

VerificationReport verify_indicator_supersolution(const CsgSet& u, const CsgSet& omega, int k,
                                                  const std::vector<Point>& samples, double s, WitnessMode mode,
                                                  const VerifierConfig& cfg) {
  const int n = u.dim();
  FracParams{s, k, n}.validate();
  const FieldPtr field = indicator_field(u);
  VerificationReport report;
  report.name = "indicator supersolution (" + to_string(mode) + ")";
  report.tolerance = kIndicatorTol;
  report.samples.resize(samples.size());
  parallel_for(samples.size(), cfg.exec, [&](std::size_t i) {
    SampleRecord& rec = report.samples[i];
    rec.index = i;
    rec.point = samples[i];
    const Point& x = samples[i];
    auto dir = [&](const Vector& d) { return eval_directional(*field, x, UnitDirection(d), s, cfg.spec); };
    try {
      if (!contains(omega, x)) {
        rec.outcome = SampleOutcome::Skipped;
        rec.detail = "outside Omega";
        return;
      }
      PredicateSearch search = cfg.search;
      search.opt.exec = Execution::Serial;
      if (contains(u, x)) {
        // u(x) = 1 = max u, so every second difference is <= 0.
        const Frame f = Frame::identity(n, k);
        if (mode == WitnessMode::Frames) {
          rec.frame = f;
          fill(rec, frame_sum(*field, x, f, s, cfg.spec), kIndicatorTol, "classical (x in U)");
        } else {
          rec.subspace = Subspace(f);
          fill(rec, grid_sup(subspace_directions(*rec.subspace, cfg.subspace_directions, cfg.opt.seed), dir),
               kIndicatorTol, "classical (x in U)");
        }
        return;
      }
      const PredicateVerdict pv =
          mode == WitnessMode::Frames ? check_G(u, omega, k, x, search) : check_G_affine(u, k, x, search);
      if (pv.status == VerdictStatus::Inconclusive) {
        rec.outcome = SampleOutcome::Skipped;
        rec.detail = "predicate inconclusive: " + pv.detail;
        return;
      }
      if (pv.status == VerdictStatus::Fails) {
        rec.outcome = SampleOutcome::Failed;
        rec.pathway = "predicate";
        rec.detail = std::string(to_string(ErrorKind::PredicateFailed)) + ": " + pv.detail;
        return;
      }
      if (mode == WitnessMode::Frames) {
        rec.frame = pv.frame;
        fill(rec, frame_sum(*field, x, *pv.frame, s, cfg.spec), kIndicatorTol, "witness frame");
      } else {
        rec.subspace = pv.subspace;
        fill(rec, grid_sup(subspace_directions(*pv.subspace, cfg.subspace_directions, cfg.opt.seed), dir),
             kIndicatorTol, "witness subspace grid");
      }
    } catch (const Error& e) {
      rec.outcome = SampleOutcome::Skipped;
      rec.detail = e.what();
    }
  });
  report.tally();
  return report;
}

VerificationReport verify_distance_supersolution(const CsgSet& u, int k, const std::vector<Point>& samples, double s,
                                                 WitnessMode mode, bool truncated, const VerifierConfig& cfg) {
  const int n = u.dim();
  const FracParams params{s, k, n};
  params.validate();
  const bool bounded = is_bounded(u);
  if (!bounded && !truncated && !(s > 0.5))
    throw Error(ErrorKind::UnboundedWithoutTruncation, "unbounded U needs the truncated field or s > 1/2");
  const FieldPtr field = truncated ? truncated_distance_field(u) : distance_field(u, !bounded);
  const CsgSet everything = CsgSet::everything(n);
  const std::vector<double> eps_ladder = default_eps_sequence();
  VerificationReport report;
  report.name = std::string(truncated ? "truncated distance" : "distance") + " supersolution (" + to_string(mode) + ")";
  report.tolerance = kDistanceTol;
  report.samples.resize(samples.size());
  parallel_for(samples.size(), cfg.exec, [&](std::size_t i) {
    SampleRecord& rec = report.samples[i];
    rec.index = i;
    rec.point = samples[i];
    const Point& x = samples[i];
    try {
      PredicateSearch search = cfg.search;
      search.opt.exec = Execution::Serial;
      OptimizerConfig opt = cfg.opt;
      opt.exec = Execution::Serial;
      // Witness at the projection y0 onto the complement; the proof translates it to x.
      const DistanceBracket db = distance_bracket(u, x);
      std::optional<Frame> wf;
      std::optional<Subspace> ws;
      if (auto y0 = outside_point(u, x, db.nearest)) {
        const PredicateVerdict pv = mode == WitnessMode::Frames ? check_G(u, everything, k, *y0, search)
                                                                : check_G_affine(u, k, *y0, search);
        if (pv.status == VerdictStatus::Holds) {
          wf = pv.frame;
          ws = pv.subspace;
        }
      }
      rec.frame = wf;
      rec.subspace = ws;
      auto dir = [&](const Vector& d) { return eval_directional(*field, x, UnitDirection(d), s, cfg.spec); };
      bool classical = !kink_near(*field, x);
      if (classical) {
        try {
          if (mode == WitnessMode::Frames) {
            if (wf) {
              fill(rec, frame_sum(*field, x, *wf, s, cfg.spec), kDistanceTol, "classical, projected witness frame");
              if (rec.outcome == SampleOutcome::Certified) return;
            }
            std::vector<Frame> starts;
            if (wf) starts.push_back(*wf);
            const OperatorValue v = eval_truncated(*field, x, params, cfg.spec, opt, starts);
            rec.frame = v.frame;
            fill(rec, v, kDistanceTol, "classical, frame search");
          } else {
            if (ws) {
              fill(rec, grid_sup(subspace_directions(*ws, cfg.subspace_directions, cfg.opt.seed), dir), kDistanceTol,
                   "classical, projected witness subspace grid");
              if (rec.outcome == SampleOutcome::Certified) return;
            }
            std::vector<Subspace> starts;
            if (ws) starts.push_back(*ws);
            const OperatorValue v = eval_eigenvalue(*field, x, params, cfg.spec, opt, starts);
            rec.subspace = v.subspace;
            fill(rec, v, kDistanceTol, "classical, subspace search");
          }
          return;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NotClassicallyEvaluable) throw;
          classical = false;
        }
      }
      // Punctured pathway: integrals over tau > eps along the projected witness, for every eps.
      if (!wf && !ws) {
        rec.outcome = SampleOutcome::Skipped;
        rec.pathway = "punctured";
        rec.detail = "non-smooth sample without a witness at the projection";
        return;
      }
      OperatorValue worst;
      bool first = true;
      for (double eps : eps_ladder) {
        auto from = [&](const Vector& d) {
          return eval_directional_from(*field, x, UnitDirection(d), s, eps, cfg.spec);
        };
        OperatorValue v;
        if (mode == WitnessMode::Frames) {
          v = from(wf->matrix().col(0));
          for (int j = 1; j < k; ++j) v = v + from(wf->matrix().col(j));
        } else {
          v = grid_sup(subspace_directions(*ws, cfg.subspace_directions, cfg.opt.seed), from);
        }
        if (first || v.hi > worst.hi) worst = v;
        first = false;
      }
      fill(rec, worst, kDistanceTol, "punctured, projected witness");
    } catch (const Error& e) {
      rec.outcome = SampleOutcome::Skipped;
      rec.detail = e.what();
    }
  });
  report.tally();
  return report;
}

std::vector<double> default_eps_sequence() {
  std::vector<double> eps;
  for (int j = 3; j <= 10; ++j) eps.push_back(std::ldexp(1.0, -j));
  return eps;
}

PuncturedReport punctured_min_test(const ScalarField& u, const Point& x0, const FracParams& params,
                                   const std::vector<double>& eps, WitnessMode mode, const QuadratureSpec& spec,
                                   const OptimizerConfig& opt) {
  params.validate();
  if (params.n != u.dim() || x0.size() != u.dim())
    throw Error(ErrorKind::DimensionMismatch, "point, field and parameter dimensions differ");
  if (eps.empty()) throw Error(ErrorKind::ValidationError, "empty eps sequence");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw Error(ErrorKind::ValidationError, "eps must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw Error(ErrorKind::ValidationError, "eps must decrease");
  }
  if (!u.nonnegative()) throw Error(ErrorKind::PreconditionViolated, "punctured test needs u >= 0");
  if (std::abs(u.value(x0)) > kMinimumTol) throw Error(ErrorKind::NotAMinimumPoint, "u(x0) exceeds 1e-12");

  PuncturedReport rep;
  rep.x0 = x0;
  rep.mode = mode;
  std::vector<Frame> frame_starts;
  std::vector<Subspace> sub_starts;
  for (double e : eps) {
    const DirectionalFn f = [&](const Vector& d) {
      return eval_directional_punctured(u, x0, UnitDirection(d), params.s, e, spec);
    };
    OperatorValue v;
    if (mode == WitnessMode::Frames) {
      v = minimize_frame_sum(f, params.n, params.k, opt, frame_starts);
      frame_starts = {*v.frame};
    } else {
      v = minimize_subspace_sup(f, params.n, params.k, opt, sub_starts);
      sub_starts = {*v.subspace};
    }
    rep.steps.push_back({e, v});
  }
  const OperatorValue& last = rep.steps.back().value;
  rep.minima_vanish = std::abs(last.value) <= kMinimumTol && last.hi <= kMinimumTol;
  rep.limit_frame = last.frame;
  rep.limit_subspace = last.subspace;

  const CsgSet* pos = u.positivity_set();
  auto sampled_line_max = [&](const Vector& d) {
    const double len = 10.0 * (1.0 + x0.norm());
    constexpr int kSamples = 10000;
    double m = 0.0;
    for (int j = 0; j < kSamples; ++j) {
      const double t = -len + 2.0 * len * (j + 0.5) / kSamples;
      m = std::max(m, std::abs(u.value(x0 + t * d)));
    }
    return m;
  };
  if (mode == WitnessMode::Frames) {
    const Frame& f = *rep.limit_frame;
    if (pos) {
      rep.limit_verified = frame_avoids(*pos, x0, f);
      rep.verification = "exact interval emptiness on the limit lines";
    } else {
      double m = 0.0;
      for (int j = 0; j < f.size(); ++j) m = std::max(m, sampled_line_max(f.matrix().col(j)));
      rep.limit_verified = m <= 1e-9;
      rep.verification = "max |u| over 1e4 samples per line";
    }
  } else {
    const Subspace& v = *rep.limit_subspace;
    bool decided = false;
    if (pos) {
      const AffineAvoidance a = decide_affine_avoidance(*pos, x0, v);
      if (a.status != Avoidance::Unknown) {
        rep.limit_verified = a.status == Avoidance::Avoids;
        rep.verification = "exact affine avoidance of the limit subspace";
        decided = true;
      }
    }
    if (!decided) {
      double m = 0.0;
      for (const auto& d : subspace_directions(v, 64, opt.seed)) m = std::max(m, sampled_line_max(d));
      rep.limit_verified = m <= 1e-9;
      rep.verification = "max |u| over 1e4 samples per grid line of the limit subspace";
    }
  }
  return rep;
}

PositivityReport positivity_set_report(const ScalarField& u, const AxisBox& box, double h) {
  const int n = u.dim();
  if (!(h > 0.0)) throw Error(ErrorKind::ValidationError, "grid spacing must be positive");
  if (box.lo.size() != n || box.hi.size() != n) throw Error(ErrorKind::DimensionMismatch, "box dimension");
  std::vector<long> counts(static_cast<std::size_t>(n));
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i]) || box.hi[i] < box.lo[i])
      throw Error(ErrorKind::ValidationError, "box must be finite and nonempty");
    counts[static_cast<std::size_t>(i)] = static_cast<long>(std::floor((box.hi[i] - box.lo[i]) / h + 1e-9)) + 1;
    total *= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  if (total > 2e7) throw Error(ErrorKind::ValidationError, "grid too large");
  const auto size = static_cast<std::size_t>(total);
  auto point_of = [&](std::size_t flat) {
    Point p(n);
    for (int i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
      p[i] = box.lo[i] + h * static_cast<double>(flat % c);
      flat /= c;
    }
    return p;
  };
  std::vector<char> positive(size);
  for (std::size_t f = 0; f < size; ++f) positive[f] = u.value(point_of(f)) > kMinimumTol ? 1 : 0;
  PositivityReport rep;
  rep.h = h;
  rep.grid_points = size;
  for (std::size_t f = 0; f < size; ++f) {
    const Point p = point_of(f);
    if (positive[f]) {
      rep.positive.push_back(p);
      continue;
    }
    rep.zero.push_back(p);
    std::size_t stride = 1;
    std::size_t rest = f;
    bool adjacent = false;
    for (int i = 0; i < n && !adjacent; ++i) {
      const auto c = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
      const std::size_t idx = rest % c;
      rest /= c;
      if (idx > 0 && positive[f - stride]) adjacent = true;
      if (idx + 1 < c && positive[f + stride]) adjacent = true;
      stride *= c;
    }
    if (adjacent) rep.minima.push_back(p);
  }
  return rep;
}

}  // namespace fraclab
