#include <algorithm>
#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fraclab/commands.hpp"

using namespace fraclab;

namespace {

struct Flags {
  std::string scene_path;
  std::string fixture;
  std::string points;
  std::string format = "text";
  std::string out;
  std::string mode = "frames";
  std::string direction;
  std::string box;
  std::string eps;
  std::string s_list;
  std::string curvature_mode = "sum_top_k";
  bool timing = false;
  bool serial = false;
};

std::vector<double> numbers(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "not a number: '" + item + "'");
    }
  }
  return out;
}

void add_common(CLI::App* sub, Flags& f, CommandOptions& o) {
  sub->add_option("--scene", f.scene_path, "Scene file (JSON)");
  sub->add_option("--fixture", f.fixture, "Named fixture instead of a scene file");
  sub->add_option("--points", f.points, "x,y,z;... or halton:COUNT:lo:hi,lo:hi,...");
  sub->add_option("--s", o.s, "Fractional order s");
  sub->add_option("--k", o.k, "Frame or subspace dimension k");
  sub->add_option("--mode", f.mode, "frames | subspaces")->check(CLI::IsMember({"frames", "subspaces"}));
  sub->add_option("--restarts", o.restarts, "Optimizer restarts");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--opt-tol", o.opt_tol, "Optimizer step tolerance");
  sub->add_option("--resolution", o.resolution_deg, "Angular grid resolution in degrees");
  sub->add_option("--format", f.format, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
  sub->add_option("--out", f.out, "Report path (stdout when omitted)");
  sub->add_flag("--timing", f.timing, "Record wall time in the report");
  sub->add_flag("--serial", f.serial, "Run the serial reference path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: fractional truncated Laplacians, geometric conditions and supersolution checks"};
  app.require_subcommand(1);
  Flags f;
  CommandOptions o;

  auto* eval = app.add_subcommand("eval", "Evaluate directional, truncated or eigenvalue operators");
  add_common(eval, f, o);
  eval->add_option("--op", o.op, "directional | truncated | eigenvalue | oracle-truncated | oracle-eigenvalue");
  eval->add_option("--dir", f.direction, "Direction for --op directional (x,y,z)");

  auto* geom = app.add_subcommand("geom", "Check line, affine-subspace or convexity conditions");
  geom->set_help_flag("--help", "Print this help message and exit");
  add_common(geom, f, o);
  geom->add_option("--cond", o.cond, "G | affine | convex")->check(CLI::IsMember({"G", "affine", "convex"}));
  geom->add_option("--box", f.box, "Grid box lo:hi,lo:hi,... for --cond convex");
  geom->add_option("--h", o.h, "Grid spacing for --cond convex");
  geom->add_option("--m", o.m, "Samples per segment for --cond convex");

  auto* curv = app.add_subcommand("curvature", "Principal curvatures at boundary points");
  add_common(curv, f, o);
  curv->add_option("--curvature-mode", f.curvature_mode, "sum_top_k | single")
      ->check(CLI::IsMember({"sum_top_k", "single"}));

  auto* verify = app.add_subcommand("verify", "Certify supersolution constructions");
  add_common(verify, f, o);
  verify->add_option("--theorem", o.theorem, "indicator | distance | punctured")
      ->check(CLI::IsMember({"indicator", "distance", "punctured"}));
  verify->add_flag("--truncated", o.truncated, "Use min(dist, 1) for the distance check");
  verify->add_option("--eps", f.eps, "Decreasing eps ladder e1,e2,... for the punctured test");

  auto* limit = app.add_subcommand("limit-study", "s-sweep against the local second-order limit");
  add_common(limit, f, o);
  limit->add_option("--op", o.op, "directional | truncated | eigenvalue");
  limit->add_option("--dir", f.direction, "Direction for --op directional");
  limit->add_option("--s-list", f.s_list, "Comma-separated s values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    CLI::App* sub = app.get_subcommands().front();
    o.command = sub->get_name();
    if (f.scene_path.empty() == f.fixture.empty())
      throw Error(ErrorKind::ValidationError, "give exactly one of --scene or --fixture");
    const Scene scene = f.scene_path.empty() ? fixture_scene(f.fixture) : parse_scene(f.scene_path);
    const int n = scene.dimension;
    if (!f.points.empty()) o.points = parse_points(f.points, n);
    o.mode = f.mode == "frames" ? WitnessMode::Frames : WitnessMode::Subspaces;
    o.curvature_mode = f.curvature_mode == "single" ? CurvatureMode::Single : CurvatureMode::SumTopK;
    o.exec = f.serial ? Execution::Serial : Execution::Parallel;
    if (!f.direction.empty()) o.direction = parse_points(f.direction, n).front();
    if (!f.eps.empty()) o.eps = numbers(f.eps);
    if (!f.s_list.empty()) o.s_list = numbers(f.s_list);
    if (!f.box.empty()) {
      AxisBox box{Point(n), Point(n)};
      std::istringstream axes(f.box);
      std::string axis;
      int i = 0;
      while (std::getline(axes, axis, ',')) {
        const auto colon = axis.find(':');
        if (colon == std::string::npos || i >= n) throw Error(ErrorKind::ParseError, "box must be lo:hi per axis");
        const auto bounds = numbers(axis.substr(0, colon) + "," + axis.substr(colon + 1));
        box.lo[i] = bounds[0];
        box.hi[i] = bounds[1];
        ++i;
      }
      if (i != n) throw Error(ErrorKind::ValidationError, "box needs one lo:hi per axis");
      o.box = box;
    }
    std::string echo = "fraclab";
    // The echo leaves out flags that do not change the report body.
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--timing" || a == "--serial" || a.rfind("--out=", 0) == 0) continue;
      if (a == "--out") {
        ++i;
        continue;
      }
      echo += " " + a;
    }
    o.echo = echo;

    CommandResult res = run_command(scene, o);
    if (f.timing)
      res.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit_report(res.report, parse_format(f.format), f.out);
    if (res.errors) return 3;
    return res.finding ? 4 : 0;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "RuntimeError: " << e.what() << "\n";
    return 3;
  }
}
