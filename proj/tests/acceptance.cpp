// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/commands.hpp"
#include "fraclab/curvature.hpp"
#include "fraclab/predicates.hpp"
#include "fraclab/verifier.hpp"
#include "property_suites.hpp"

using namespace fraclab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

std::string num(double v) { return format_number(v); }

AxisBox box3(double x0, double x1, double y0, double y1, double z0, double z1) {
  return {pt({x0, y0, z0}), pt({x1, y1, z1})};
}

// First `count` Halton points of the box that lie outside the set.
std::vector<Point> halton_outside(const CsgSet& u, const AxisBox& box, std::size_t count) {
  std::vector<Point> out;
  std::size_t skip = 0;
  while (out.size() < count) {
    for (const Point& p : halton_points(3, 64, box, skip))
      if (!contains(u, p) && out.size() < count) out.push_back(p);
    skip += 64;
  }
  return out;
}

Outcome getoor() {
  const FieldPtr u = getoor_profile(0.5, 1);
  const OperatorValue v = eval_directional(*u, pt({0}), UnitDirection::axis(1, 0), 0.5);
  return {std::abs(v.value + 1.0) <= 1e-3, "value " + num(v.value) + " (oracle -1)"};
}

Outcome local_limit() {
  const FieldPtr u = gaussian_bump(pt({0, 0}), 1.0);
  std::vector<double> errors;
  std::string detail = "abs errors";
  for (double s : {0.9, 0.95, 0.99}) {
    errors.push_back(std::abs(eval_directional(*u, pt({0, 0}), UnitDirection::axis(2, 0), s).value + 2.0));
    detail += " " + num(errors.back());
  }
  const bool decreasing = errors[0] > errors[1] && errors[1] > errors[2];
  const double rel = errors.back() / 2.0;
  detail += "; final relative " + num(rel);
  return {decreasing && rel < 0.1, detail};
}

Outcome operator_limit() {
  const FieldPtr u = anisotropic_bump(pt({0, 0}), Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix());
  const FracParams p{0.99, 1, 2};
  const double lambda1 = local_limit_reference(*u, pt({0, 0}), 1).first;
  const double t = eval_truncated(*u, pt({0, 0}), p).value;
  const double e = eval_eigenvalue(*u, pt({0, 0}), p).value;
  const double rt = std::abs(t - lambda1) / std::abs(lambda1);
  const double re = std::abs(e - lambda1) / std::abs(lambda1);
  const double gap = std::abs(t - e);
  const bool ok = rt < 0.1 && re < 0.1 && gap <= 1e-5 * std::abs(t) && std::abs(lambda1 + 8.0) < 1e-6;
  return {ok, "lambda1 " + num(lambda1) + ", truncated " + num(t) + " (rel " + num(rt) + "), eigenvalue " + num(e) +
                  " (rel " + num(re) + "), |diff| " + num(gap)};
}

Outcome example_reproduction() {
  const Scene sc = fixture_scene("two-balls-r3");
  const double eps = 0.1;
  const double r = std::sqrt(1 - eps * eps);
  const PredicateVerdict a = check_G_affine(sc.set, 2, pt({0, eps, r}));
  const Point paper = pt({0, 4, r - eps / r * (4 - eps)});
  bool ok_a = a.status == VerdictStatus::Fails && a.certificate.has_value();
  double dev = 0.0;
  if (ok_a) {
    dev = (*a.certificate - paper).norm();
    ok_a = dev <= 1e-6 && contains(CsgSet::ball(pt({0, 4, 0}), 1.0), *a.certificate);
  }
  const auto pts = halton_outside(sc.set, box3(-2, 2, -2, 6, -2, 2), 50);
  int holds = 0;
  for (const Point& x : pts) {
    const PredicateVerdict g = check_G(sc.set, sc.omega, 2, x);
    if (g.status == VerdictStatus::Holds && frame_avoids(sc.set, x, *g.frame)) ++holds;
  }
  return {ok_a && holds == 50, "(a) " + to_string(a.status) + ", certificate deviation " + num(dev) + "; (b) " +
                                   std::to_string(holds) + "/50 hold with exact re-verification"};
}

Outcome closing_remark() {
  const Scene sc = fixture_scene("annulus-shell");
  const PredicateVerdict one = check_G_affine(sc.set, 1, pt({0, 0, 0}));
  bool ok1 = one.status == VerdictStatus::Holds && one.subspace &&
             affine_subspace_avoids(sc.set, pt({0, 0, 0}), *one.subspace);
  double angle = -1.0;
  if (ok1) angle = line_angle(one.subspace->basis().matrix().col(0), pt({0, 0, 1}));
  PredicateSearch search;
  search.resolution_deg = 2.0;
  const PredicateVerdict two = check_G_affine(sc.set, 2, pt({0, 0, 0}), search);
  const bool ok2 = two.status == VerdictStatus::Fails && two.resolution == 2.0;
  return {ok1 && ok2, "k=1 " + to_string(one.status) + " (angle to e3 " + num(angle) + "), k=2 " + to_string(two.status) +
                          " at " + num(two.resolution) + " deg over " + std::to_string(two.cells) + " cells"};
}

Outcome indicator_certification() {
  const Scene two = fixture_scene("two-balls-r3");
  const auto a = verify_indicator_supersolution(two.set, two.omega, 2, halton_points(3, 50, box3(-2, 2, -2, 6, -2, 2)),
                                                0.5, WitnessMode::Frames);
  const Scene ball = fixture_scene("unit-ball");
  const auto b = verify_indicator_supersolution(ball.set, ball.omega, 2, halton_points(3, 50, box3(-2, 2, -2, 2, -2, 2)),
                                                0.5, WitnessMode::Subspaces);
  auto good = [](const VerificationReport& r) {
    bool bounded = true;
    for (const auto& s : r.samples)
      if (s.outcome == SampleOutcome::Certified) bounded = bounded && s.hi <= 1e-12;
    return bounded && r.failed == 0 && r.certified >= 45;
  };
  return {good(a) && good(b), "two-balls frames " + std::to_string(a.certified) + " certified, " +
                                  std::to_string(a.skipped) + " skipped, " + std::to_string(a.failed) +
                                  " failed; unit-ball subspaces " + std::to_string(b.certified) + " certified, " +
                                  std::to_string(b.skipped) + " skipped, " + std::to_string(b.failed) + " failed"};
}

Outcome distance_certification() {
  const Scene sc = fixture_scene("two-balls-r3");
  const auto r = verify_distance_supersolution(sc.set, 2, halton_points(3, 50, box3(-2, 2, -2, 6, -2, 2)), 0.5,
                                               WitnessMode::Frames, false);
  int punctured = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : r.samples) {
    if (s.pathway.rfind("punctured", 0) == 0) ++punctured;
    if (s.outcome == SampleOutcome::Certified) worst = std::max(worst, s.hi);
  }
  return {r.certified == 50 && r.failed == 0 && r.skipped == 0,
          std::to_string(r.certified) + "/50 certified (" + std::to_string(punctured) +
              " through the punctured pathway), largest upper bracket " + num(worst)};
}

Outcome punctured_pipeline() {
  const Scene sc = fixture_scene("two-balls-r3");
  const FieldPtr u = indicator_field(sc.set);
  const PuncturedReport r = punctured_min_test(*u, pt({0, 2, 0}), {0.5, 2, 3}, default_eps_sequence(), WitnessMode::Frames);
  bool zeros = !r.steps.empty();
  for (const auto& st : r.steps) zeros = zeros && st.value.value == 0.0;
  const bool avoid = r.limit_frame && frame_avoids(sc.set, pt({0, 2, 0}), *r.limit_frame);
  return {zeros && avoid && r.limit_verified,
          std::to_string(r.steps.size()) + " eps steps, minima " + (zeros ? "all exactly 0" : "not all 0") +
              ", limit frame " + (avoid ? "avoids U" : "does not avoid U")};
}

Outcome curvature_fixtures() {
  const Scene par = fixture_scene("paraboloid");
  const auto kp = principal_curvatures(par.make_patch(), pt({0, 0, 0}));
  const Scene sh = fixture_scene("annulus-shell");
  const ImplicitSurfacePatch shell_patch = sh.make_patch();
  const auto ks = principal_curvatures(shell_patch, pt({1, 0, 0}));
  const bool values = std::abs(kp[0] - 1) <= 1e-6 && std::abs(kp[1] - 1) <= 1e-6 && std::abs(ks[0] + 1) <= 1e-6 &&
                      std::abs(ks[1]) <= 1e-6;
  bool consistent = true;
  for (int k : {1, 2})
    for (CurvatureMode m : {CurvatureMode::SumTopK, CurvatureMode::Single})
      consistent = consistent && check_curvature(par.make_patch(), pt({0, 0, 0}), k, m).status == VerdictStatus::Holds;
  // at the hole side of the inner boundary the conditions and the curvature signs agree
  const Point hole = pt({0.9, 0, 0});
  const auto g1 = check_G(sh.set, sh.omega, 1, hole).status;
  const auto g2 = check_G(sh.set, sh.omega, 2, hole).status;
  const auto a1 = check_G_affine(sh.set, 1, hole).status;
  const auto a2 = check_G_affine(sh.set, 2, hole).status;
  const auto c1 = check_curvature(shell_patch, pt({1, 0, 0}), 1, CurvatureMode::SumTopK).status;
  const auto c2 = check_curvature(shell_patch, pt({1, 0, 0}), 2, CurvatureMode::SumTopK).status;
  const auto d1 = check_curvature(shell_patch, pt({1, 0, 0}), 1, CurvatureMode::Single).status;
  const auto d2 = check_curvature(shell_patch, pt({1, 0, 0}), 2, CurvatureMode::Single).status;
  consistent = consistent && g1 == VerdictStatus::Holds && c1 == VerdictStatus::Holds;
  consistent = consistent && a1 == VerdictStatus::Holds && d1 == VerdictStatus::Holds;
  consistent = consistent && g2 == VerdictStatus::Fails && c2 == VerdictStatus::Fails;
  consistent = consistent && a2 == VerdictStatus::Fails && d2 == VerdictStatus::Fails;
  return {values && consistent, "paraboloid (" + num(kp[0]) + ", " + num(kp[1]) + "), shell (" + num(ks[0]) + ", " +
                                    num(ks[1]) + "); theorem consistency " + (consistent ? "holds" : "violated")};
}

Outcome convexity() {
  auto run = [](const std::string& fixture) {
    CommandOptions o;
    o.command = "geom";
    o.cond = "convex";
    o.h = 0.05;
    o.m = 32;
    return run_command(fixture_scene(fixture), o).report.records.front();
  };
  const ReportRecord ball = run("unit-ball");
  const ReportRecord two = run("two-balls-r3");
  const ReportRecord sh = run("annulus-shell");
  const bool cert = sh.witness_kind == "certificate" && !sh.witness.empty() && sh.witness.front().norm() <= 1e-9;
  return {ball.verdict == "holds" && two.verdict == "holds" && sh.verdict == "fails" && cert,
          "unit-ball " + ball.verdict + ", two-balls-r3 " + two.verdict + ", annulus-shell " + sh.verdict +
              (cert ? " at (0,0,0)" : " without the expected certificate")};
}

Outcome property_suites() {
  const std::vector<props::SuiteResult> results = {props::symmetry_suite(),     props::scaling_suite(20),
                                                   props::rotation_suite(5),    props::monotonicity_suite(10),
                                                   props::sandwich_suite(20),   props::oracle_suite(20)};
  bool ok = true;
  std::string detail;
  for (const auto& r : results) {
    ok = ok && r.ok();
    if (!detail.empty()) detail += "; ";
    detail += r.summary();
  }
  return {ok, detail};
}

// Every subcommand on the fixtures, rendered in all three formats.
std::vector<std::string> full_suite(Execution exec) {
  std::vector<std::pair<std::string, CommandOptions>> runs;
  auto add = [&](const std::string& fixture, CommandOptions o) {
    o.exec = exec;
    o.seed = 0;
    runs.emplace_back(fixture, o);
  };
  CommandOptions o;
  o.command = "eval";
  o.op = "directional";
  o.points = {pt({0}), pt({0.5})};
  add("getoor", o);
  o = {};
  o.command = "eval";
  o.op = "truncated";
  o.k = 2;
  o.points = halton_points(3, 6, box3(-2, 2, -2, 6, -2, 2));
  add("two-balls-r3", o);
  o.op = "eigenvalue";
  add("two-balls-r3", o);
  o = {};
  o.command = "geom";
  o.cond = "G";
  o.k = 2;
  o.points = halton_points(3, 8, box3(-2, 2, -2, 6, -2, 2));
  add("two-balls-r3", o);
  o.cond = "affine";
  o.points.push_back(pt({0, 0.1, std::sqrt(0.99)}));
  add("two-balls-r3", o);
  o = {};
  o.command = "curvature";
  o.points = {pt({0, 0, 0}), pt({0.5, 0.5, 0.25})};
  add("paraboloid", o);
  o = {};
  o.command = "verify";
  o.theorem = "indicator";
  o.k = 2;
  o.points = halton_points(3, 8, box3(-2, 2, -2, 6, -2, 2));
  add("two-balls-r3", o);
  o.theorem = "distance";
  add("two-balls-r3", o);
  o.theorem = "punctured";
  o.points = {pt({0, 2, 0})};
  add("two-balls-r3", o);
  o.theorem = "indicator";
  o.mode = WitnessMode::Subspaces;
  o.points = halton_points(3, 8, box3(-2, 2, -2, 2, -2, 2));
  add("unit-ball", o);

  std::vector<std::string> out;
  for (const auto& [fixture, opts] : runs) {
    const Report r = run_command(fixture_scene(fixture), opts).report;
    for (ReportFormat f : {ReportFormat::Text, ReportFormat::Json, ReportFormat::Csv}) out.push_back(render_report(r, f));
  }
  return out;
}

Outcome determinism() {
  const auto first = full_suite(Execution::Parallel);
  const auto second = full_suite(Execution::Parallel);
  const auto serial = full_suite(Execution::Serial);
  std::size_t bytes = 0;
  for (const auto& s : first) bytes += s.size();
  const bool repeat = first == second;
  const bool across = first == serial;
  return {repeat && across, std::to_string(first.size()) + " reports (" + std::to_string(bytes) + " bytes): repeat run " +
                                (repeat ? "identical" : "differs") + ", serial vs parallel " +
                                (across ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Getoor quadrature oracle", 1.0, getoor},
      {2, "local-limit study", 60.0, local_limit},
      {3, "operator-level limit", 120.0, operator_limit},
      {4, "two-balls example reproduction", 120.0, example_reproduction},
      {5, "annulus-shell reproduction", 60.0, closing_remark},
      {6, "indicator supersolution certification", 120.0, indicator_certification},
      {7, "distance supersolution certification", 300.0, distance_certification},
      {8, "punctured minimum pipeline", 60.0, punctured_pipeline},
      {9, "curvature fixtures", 10.0, curvature_fixtures},
      {10, "convex components", 60.0, convexity},
      {11, "property suites", 600.0, property_suites},
      {12, "determinism", 600.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs of %.0fs", secs, c.budget_s);
    std::printf("%s  %2d. %s [%s] %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), timing, o.detail.c_str(),
                in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
