#include "fraclab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/parallel.hpp"

namespace fraclab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  }
}

std::vector<Vector> columns(const Matrix& m) {
  std::vector<Vector> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

void attach(ReportRecord& rec, const OperatorValue& v) {
  rec.value = v.value;
  rec.lo = v.lo;
  rec.hi = v.hi;
  if (v.subspace) {
    rec.witness_kind = "subspace";
    rec.witness = columns(v.subspace->basis().matrix());
  } else if (v.frame) {
    rec.witness_kind = "frame";
    rec.witness = columns(v.frame->matrix());
  }
  rec.detail = v.note;
}

void attach(ReportRecord& rec, const PredicateVerdict& v) {
  rec.verdict = to_string(v.status);
  if (v.frame) {
    rec.witness_kind = "frame";
    rec.witness = columns(v.frame->matrix());
  } else if (v.certificate) {
    rec.witness_kind = "certificate";
    rec.witness = {*v.certificate};
    if (v.subspace) {
      for (auto& c : columns(v.subspace->basis().matrix())) rec.witness.push_back(c);
    }
  } else if (v.subspace) {
    rec.witness_kind = "subspace";
    rec.witness = columns(v.subspace->basis().matrix());
  }
  rec.detail = v.detail;
  if (v.status != VerdictStatus::Holds)
    rec.detail += " (resolution " + format_number(v.resolution) + ", cells " + std::to_string(v.cells) + ")";
}

AxisBox default_box(const CsgSet& set, double h) {
  AxisBox ext = extent_box(set);
  const auto n = ext.lo.size();
  AxisBox box{Point(n), Point(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lo = std::isfinite(ext.lo[i]) ? ext.lo[i] : -1.0;
    const double hi = std::isfinite(ext.hi[i]) ? ext.hi[i] : 1.0;
    box.lo[i] = h * std::floor(lo / h) - 2.0 * h;
    box.hi[i] = h * std::ceil(hi / h) + 2.0 * h;
  }
  return box;
}

std::string counts_text(const std::vector<ReportRecord>& recs, const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) {
    const auto c = std::count_if(recs.begin(), recs.end(), [&](const ReportRecord& r) { return r.verdict == l; });
    if (!out.empty()) out += ", ";
    out += l + " " + std::to_string(c);
  }
  return out;
}

// Runs fn per point into its own record; library errors become "error" records.
template <class F>
bool per_point(Report& report, const std::vector<Point>& points, Execution exec, F&& fn) {
  report.records.resize(points.size());
  parallel_for(points.size(), exec, [&](std::size_t i) {
    ReportRecord& rec = report.records[i];
    rec.index = i;
    rec.x = points[i];
    try {
      fn(points[i], rec);
    } catch (const Error& e) {
      rec = ReportRecord{};
      rec.index = i;
      rec.x = points[i];
      rec.verdict = "error";
      rec.detail = e.what();
    }
  });
  return std::any_of(report.records.begin(), report.records.end(),
                     [](const ReportRecord& r) { return r.verdict == "error"; });
}

double directional_second_derivative(const ScalarField& u, const Point& x, const Vector& d) {
  const double h = 1e-4 * (1.0 + x.norm());
  return (u.value(x + h * d) - 2.0 * u.value(x) + u.value(x - h * d)) / (h * h);
}

CommandResult run_eval(const Scene& sc, const CommandOptions& o, const std::vector<Point>& pts) {
  CommandResult res;
  const FieldPtr u = sc.make_field();
  OptimizerConfig opt = sc.optimizer;
  opt.exec = Execution::Serial;
  const Vector dir = o.direction.value_or(Vector::Unit(sc.dimension, 0));
  if (dir.size() != sc.dimension) throw Error(ErrorKind::ValidationError, "direction dimension differs from scene");
  res.errors = per_point(res.report, pts, o.exec, [&](const Point& x, ReportRecord& rec) {
    if (o.op == "directional") {
      attach(rec, eval_directional(*u, x, UnitDirection(dir), sc.params.s, sc.quadrature));
    } else if (o.op == "truncated") {
      attach(rec, eval_truncated(*u, x, sc.params, sc.quadrature, opt));
    } else if (o.op == "eigenvalue") {
      attach(rec, eval_eigenvalue(*u, x, sc.params, sc.quadrature, opt));
    } else if (o.op == "oracle-truncated" || o.op == "oracle-eigenvalue") {
      const auto kind = o.op == "oracle-truncated" ? OperatorKind::Truncated : OperatorKind::Eigenvalue;
      attach(rec, brute_force_oracle(*u, x, sc.params, o.resolution_deg, kind, sc.quadrature, Execution::Serial));
    } else {
      throw Error(ErrorKind::ValidationError, "unknown operator '" + o.op + "'");
    }
  });
  res.report.add_summary("operator", o.op);
  res.report.add_summary("field", u->describe());
  res.report.add_summary("s", format_number(sc.params.s));
  res.report.add_summary("k", std::to_string(sc.params.k));
  if (o.op == "truncated") res.report.add_summary("bound", "values are upper bounds of the infimum over frames");
  if (o.op == "eigenvalue")
    res.report.add_summary("bound", "values are inner-sup lower bounds at the best subspace found");
  return res;
}

CommandResult run_geom(const Scene& sc, const CommandOptions& o, const std::vector<Point>& pts) {
  CommandResult res;
  PredicateSearch search;
  search.resolution_deg = o.resolution_deg;
  search.opt = sc.optimizer;
  search.opt.exec = Execution::Serial;
  if (o.cond == "convex") {
    const AxisBox box = o.box.value_or(default_box(sc.set, o.h));
    const PredicateVerdict v = check_convex_components(sc.set, box, o.h, o.m);
    ReportRecord rec;
    rec.x = Point::Zero(0);
    attach(rec, v);
    res.report.records.push_back(rec);
    res.report.add_summary("box", "[" + [&] {
      std::string s;
      for (Eigen::Index i = 0; i < box.lo.size(); ++i)
        s += (i ? " x " : "") + format_number(box.lo[i]) + ":" + format_number(box.hi[i]);
      return s;
    }() + "]");
    res.report.add_summary("h", format_number(o.h));
    res.report.add_summary("m", std::to_string(o.m));
    res.finding = v.status == VerdictStatus::Fails;
    return res;
  }
  if (o.cond != "G" && o.cond != "affine") throw Error(ErrorKind::ValidationError, "unknown condition '" + o.cond + "'");
  res.errors = per_point(res.report, pts, o.exec, [&](const Point& x, ReportRecord& rec) {
    const PredicateVerdict v = o.cond == "G" ? check_G(sc.set, sc.omega, sc.params.k, x, search)
                                             : check_G_affine(sc.set, sc.params.k, x, search);
    attach(rec, v);
  });
  res.finding = std::any_of(res.report.records.begin(), res.report.records.end(),
                            [](const ReportRecord& r) { return r.verdict == "fails"; });
  res.report.add_summary("condition", o.cond);
  res.report.add_summary("k", std::to_string(sc.params.k));
  res.report.add_summary("counts", counts_text(res.report.records, {"holds", "fails", "inconclusive", "error"}));
  return res;
}

CommandResult run_curvature(const Scene& sc, const CommandOptions& o, const std::vector<Point>& pts) {
  CommandResult res;
  const ImplicitSurfacePatch patch = sc.make_patch();
  res.errors = per_point(res.report, pts, o.exec, [&](const Point& x, ReportRecord& rec) {
    const Point y = project_to_boundary(patch, x);
    const std::vector<double> kappa = principal_curvatures(patch, y);
    const PredicateVerdict v = check_curvature(patch, y, sc.params.k, o.curvature_mode);
    rec.x = y;
    rec.verdict = to_string(v.status);
    rec.detail = v.detail;
    double q = 0.0;
    const int m = static_cast<int>(kappa.size());
    if (o.curvature_mode == CurvatureMode::SumTopK) {
      for (int i = 0; i < sc.params.k; ++i) q += kappa[static_cast<std::size_t>(m - 1 - i)];
    } else {
      q = kappa[static_cast<std::size_t>(m - sc.params.k)];
    }
    rec.value = q;
  });
  res.finding = std::any_of(res.report.records.begin(), res.report.records.end(),
                            [](const ReportRecord& r) { return r.verdict == "fails"; });
  res.report.add_summary("mode", o.curvature_mode == CurvatureMode::SumTopK ? "sum_top_k" : "single");
  res.report.add_summary("k", std::to_string(sc.params.k));
  res.report.add_summary("counts", counts_text(res.report.records, {"holds", "fails", "error"}));
  return res;
}

void verification_records(const VerificationReport& vr, Report& out) {
  for (const auto& s : vr.samples) {
    ReportRecord rec;
    rec.index = s.index;
    rec.x = s.point;
    if (s.outcome != SampleOutcome::Skipped || !s.pathway.empty()) {
      rec.value = s.value;
      rec.lo = s.lo;
      rec.hi = s.hi;
    }
    rec.verdict = to_string(s.outcome);
    if (s.frame) {
      rec.witness_kind = "frame";
      rec.witness = columns(s.frame->matrix());
    } else if (s.subspace) {
      rec.witness_kind = "subspace";
      rec.witness = columns(s.subspace->basis().matrix());
    }
    rec.detail = s.pathway + (s.detail.empty() ? "" : (s.pathway.empty() ? "" : "; ") + s.detail);
    out.records.push_back(rec);
  }
  out.add_summary("check", vr.name);
  out.add_summary("tolerance", format_number(vr.tolerance));
  out.add_summary("certified", std::to_string(vr.certified));
  out.add_summary("skipped", std::to_string(vr.skipped));
  out.add_summary("failed", std::to_string(vr.failed));
}

CommandResult run_verify(const Scene& sc, const CommandOptions& o, const std::vector<Point>& pts) {
  CommandResult res;
  VerifierConfig cfg;
  cfg.spec = sc.quadrature;
  cfg.opt = sc.optimizer;
  cfg.search.opt = sc.optimizer;
  cfg.search.resolution_deg = o.resolution_deg;
  cfg.exec = o.exec;
  const int k = sc.params.k;
  if (o.theorem == "indicator") {
    const auto vr = verify_indicator_supersolution(sc.set, sc.omega, k, pts, sc.params.s, o.mode, cfg);
    verification_records(vr, res.report);
    res.finding = vr.failed > 0;
    return res;
  }
  if (o.theorem == "distance") {
    const auto vr = verify_distance_supersolution(sc.set, k, pts, sc.params.s, o.mode, o.truncated, cfg);
    verification_records(vr, res.report);
    res.finding = vr.failed > 0;
    return res;
  }
  if (o.theorem != "punctured") throw Error(ErrorKind::ValidationError, "unknown theorem '" + o.theorem + "'");
  const FieldPtr u = sc.make_field();
  const std::vector<double> eps = o.eps.empty() ? default_eps_sequence() : o.eps;
  OptimizerConfig opt = sc.optimizer;
  opt.exec = Execution::Serial;
  res.errors = per_point(res.report, pts, o.exec, [&](const Point& x, ReportRecord& rec) {
    const PuncturedReport pr = punctured_min_test(*u, x, sc.params, eps, o.mode, sc.quadrature, opt);
    const OperatorValue& last = pr.steps.back().value;
    rec.value = last.value;
    rec.lo = last.lo;
    rec.hi = last.hi;
    rec.verdict = pr.minima_vanish && pr.limit_verified ? "certified" : "failed";
    if (pr.limit_frame) {
      rec.witness_kind = "frame";
      rec.witness = columns(pr.limit_frame->matrix());
    } else if (pr.limit_subspace) {
      rec.witness_kind = "subspace";
      rec.witness = columns(pr.limit_subspace->basis().matrix());
    }
    std::string ladder;
    for (const auto& st : pr.steps) ladder += (ladder.empty() ? "" : " ") + format_number(st.eps) + ":" + format_number(st.value.value);
    rec.detail = "minima " + ladder + "; " + pr.verification + (pr.limit_verified ? " holds" : " fails");
  });
  res.finding = std::any_of(res.report.records.begin(), res.report.records.end(),
                            [](const ReportRecord& r) { return r.verdict == "failed"; });
  res.report.add_summary("check", "punctured minimum test (" + to_string(o.mode) + ")");
  res.report.add_summary("counts", counts_text(res.report.records, {"certified", "failed", "error"}));
  return res;
}

CommandResult run_limit_study(const Scene& sc, const CommandOptions& o, const std::vector<Point>& pts) {
  CommandResult res;
  const FieldPtr u = sc.make_field();
  const Point x = pts.front();
  const Vector dir = o.direction.value_or(Vector::Unit(sc.dimension, 0));
  double reference;
  if (o.op == "directional") reference = directional_second_derivative(*u, x, dir.normalized());
  else if (o.op == "truncated") reference = local_limit_reference(*u, x, sc.params.k).first;
  else if (o.op == "eigenvalue") reference = local_limit_reference(*u, x, sc.params.k).second;
  else throw Error(ErrorKind::ValidationError, "limit study supports directional, truncated and eigenvalue");
  OptimizerConfig opt = sc.optimizer;
  opt.exec = Execution::Serial;
  std::vector<double> errors(o.s_list.size());
  res.report.records.resize(o.s_list.size());
  parallel_for(o.s_list.size(), o.exec, [&](std::size_t i) {
    FracParams p = sc.params;
    p.s = o.s_list[i];
    OperatorValue v;
    if (o.op == "directional") v = eval_directional(*u, x, UnitDirection(dir), p.s, sc.quadrature);
    else if (o.op == "truncated") v = eval_truncated(*u, x, p, sc.quadrature, opt);
    else v = eval_eigenvalue(*u, x, p, sc.quadrature, opt);
    ReportRecord& rec = res.report.records[i];
    rec.index = i;
    rec.x = x;
    attach(rec, v);
    errors[i] = std::abs(v.value - reference);
    rec.detail = "s = " + format_number(p.s) + ", reference = " + format_number(reference) +
                 ", abs error = " + format_number(errors[i]);
  });
  bool decreasing = true;
  for (std::size_t i = 1; i < errors.size(); ++i) decreasing = decreasing && errors[i] < errors[i - 1];
  res.report.add_summary("operator", o.op);
  res.report.add_summary("reference", format_number(reference));
  res.report.add_summary("errors_decreasing", decreasing ? "yes" : "no");
  if (!errors.empty())
    res.report.add_summary("final_relative_error", format_number(errors.back() / std::max(std::abs(reference), 1e-300)));
  return res;
}

}  // namespace

CommandResult run_command(const Scene& scene, const CommandOptions& o) {
  Scene sc = scene;
  if (o.s) sc.params.s = *o.s;
  if (o.k) sc.params.k = *o.k;
  if (o.restarts) sc.optimizer.restarts = *o.restarts;
  if (o.seed) sc.optimizer.seed = *o.seed;
  if (o.opt_tol) sc.optimizer.tol = *o.opt_tol;
  sc.validate();
  std::vector<Point> pts = o.points;
  if (pts.empty()) pts.push_back(Point::Zero(sc.dimension));
  for (const auto& p : pts)
    if (p.size() != sc.dimension) throw Error(ErrorKind::ValidationError, "point dimension differs from scene");

  CommandResult res;
  if (o.command == "eval") res = run_eval(sc, o, pts);
  else if (o.command == "geom") res = run_geom(sc, o, pts);
  else if (o.command == "curvature") res = run_curvature(sc, o, pts);
  else if (o.command == "verify") res = run_verify(sc, o, pts);
  else if (o.command == "limit-study") res = run_limit_study(sc, o, pts);
  else throw Error(ErrorKind::ValidationError, "unknown command '" + o.command + "'");
  res.report.command = o.echo.empty() ? o.command : o.echo;
  res.report.seed = sc.optimizer.seed;
  res.report.summary.insert(res.report.summary.begin(), {"scene", sc.name});
  return res;
}

std::vector<Point> parse_points(const std::string& spec, int n) {
  if (spec.rfind("halton:", 0) == 0) {
    const auto parts = split(spec, ':');
    // halton, COUNT, then lo:hi pairs separated by commas (split on ':' interleaves them).
    if (parts.size() < 2) throw Error(ErrorKind::ParseError, "halton spec needs a count");
    const long count = std::lround(to_double(parts[1]));
    if (count < 0) throw Error(ErrorKind::ValidationError, "negative point count");
    AxisBox box{Point::Constant(n, -1.0), Point::Constant(n, 1.0)};
    if (parts.size() > 2) {
      const std::string rest = spec.substr(spec.find(':', 7) + 1);
      const auto axes = split(rest, ',');
      if (static_cast<int>(axes.size()) != n) throw Error(ErrorKind::ValidationError, "halton box needs one lo:hi per axis");
      for (int i = 0; i < n; ++i) {
        const auto lh = split(axes[static_cast<std::size_t>(i)], ':');
        if (lh.size() != 2) throw Error(ErrorKind::ParseError, "axis range must be lo:hi");
        box.lo[i] = to_double(lh[0]);
        box.hi[i] = to_double(lh[1]);
      }
    }
    return halton_points(n, static_cast<std::size_t>(count), box);
  }
  std::vector<Point> pts;
  for (const auto& item : split(spec, ';')) {
    if (item.empty()) continue;
    const auto c = split(item, ',');
    if (static_cast<int>(c.size()) != n)
      throw Error(ErrorKind::ValidationError, "point '" + item + "' needs " + std::to_string(n) + " coordinates");
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = to_double(c[static_cast<std::size_t>(i)]);
    pts.push_back(p);
  }
  return pts;
}

std::vector<Point> halton_points(int n, std::size_t count, const AxisBox& box, std::size_t skip) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n > 12) throw Error(ErrorKind::DimensionTooLarge, "halton points support N <= 12");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < count; ++i) {
    Point p(n);
    for (int d = 0; d < n; ++d) {
      const int b = primes[d];
      double f = 1.0, r = 0.0;
      for (std::size_t idx = i + 1 + skip; idx > 0; idx /= static_cast<std::size_t>(b)) {
        f /= b;
        r += f * static_cast<double>(idx % static_cast<std::size_t>(b));
      }
      p[d] = box.lo[d] + r * (box.hi[d] - box.lo[d]);
    }
    pts.push_back(p);
  }
  return pts;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return 1;
    case ErrorKind::ValidationError:
    case ErrorKind::OutOfRange:
    case ErrorKind::InvalidDimension:
    case ErrorKind::DimensionMismatch: return 2;
    default: return 3;
  }
}

}  // namespace fraclab
