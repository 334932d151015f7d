#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/report.hpp"
#include "fraclab/scene_io.hpp"
#include "fraclab/verifier.hpp"

namespace fraclab {

struct CommandOptions {
  std::string command;             ///< eval | geom | curvature | verify | limit-study
  std::string op = "directional";  ///< eval: directional | truncated | eigenvalue | oracle-truncated | oracle-eigenvalue
  std::string cond = "G";          ///< geom: G | affine | convex
  std::string theorem = "indicator";  ///< verify: indicator | distance | punctured
  CurvatureMode curvature_mode = CurvatureMode::SumTopK;
  std::vector<Point> points;
  std::optional<double> s;
  std::optional<int> k;
  WitnessMode mode = WitnessMode::Frames;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<double> opt_tol;
  std::optional<Vector> direction;
  double resolution_deg = 2.0;
  bool truncated = false;
  std::optional<AxisBox> box;
  double h = 0.05;
  int m = 32;
  std::vector<double> eps;
  std::vector<double> s_list = {0.9, 0.95, 0.99};
  Execution exec = Execution::Parallel;
  std::string echo;
};

struct CommandResult {
  Report report;
  bool finding = false;  ///< a predicate or certification failed (exit code 4)
  bool errors = false;   ///< some sample raised a library error (exit code 3)
};

/// Applies the option overrides to a copy of the scene and dispatches.
CommandResult run_command(const Scene& scene, const CommandOptions& options);

/// Explicit list "x1,y1;x2,y2" or "halton:COUNT:lo:hi,lo:hi,..." (one lo:hi per axis).
std::vector<Point> parse_points(const std::string& spec, int n);
/// Halton sequence (bases 2, 3, 5, ...) scaled to the box, skipping the first `skip` terms.
std::vector<Point> halton_points(int n, std::size_t count, const AxisBox& box, std::size_t skip = 0);

/// 1 parse, 2 validation, 3 runtime.
int exit_code_for(ErrorKind kind);

}  // namespace fraclab
