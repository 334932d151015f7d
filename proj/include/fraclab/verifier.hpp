#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraclab/fields.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/predicates.hpp"

namespace fraclab {

enum class WitnessMode { Frames, Subspaces };
std::string to_string(WitnessMode m);

enum class SampleOutcome { Certified, Skipped, Failed };
std::string to_string(SampleOutcome o);

struct SampleRecord {
  std::size_t index = 0;
  Point point;
  SampleOutcome outcome = SampleOutcome::Skipped;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string pathway;
  std::optional<Frame> frame;
  std::optional<Subspace> subspace;
  std::string detail;
};

struct VerificationReport {
  std::string name;
  double tolerance = 0.0;
  std::vector<SampleRecord> samples;
  int certified = 0;
  int skipped = 0;
  int failed = 0;
  void tally();
};

struct VerifierConfig {
  QuadratureSpec spec{};
  PredicateSearch search{};
  OptimizerConfig opt{};
  int subspace_directions = 64;  ///< direction grid on the unit sphere of a witness subspace
  Execution exec = Execution::Parallel;
};

/// Certifies that chi_U satisfies the operator inequality (value <= 1e-12) at each sample.
VerificationReport verify_indicator_supersolution(const CsgSet& u, const CsgSet& omega, int k,
                                                  const std::vector<Point>& samples, double s, WitnessMode mode,
                                                  const VerifierConfig& cfg = {});

/// Certifies dist(., R^N \ U) at each sample (value <= 1e-6), through classical evaluation at C^2
/// points and the punctured pathway near kinks.
VerificationReport verify_distance_supersolution(const CsgSet& u, int k, const std::vector<Point>& samples, double s,
                                                 WitnessMode mode, bool truncated, const VerifierConfig& cfg = {});

struct PuncturedStep {
  double eps = 0.0;
  OperatorValue value;
};

struct PuncturedReport {
  Point x0;
  WitnessMode mode = WitnessMode::Frames;
  std::vector<PuncturedStep> steps;
  bool minima_vanish = false;  ///< |value| <= 1e-12 at the smallest eps
  std::optional<Frame> limit_frame;
  std::optional<Subspace> limit_subspace;
  bool limit_verified = false;  ///< u vanishes on the limit lines or affine subspace
  std::string verification;
};

/// Default eps ladder 2^-3, ..., 2^-10.
std::vector<double> default_eps_sequence();

PuncturedReport punctured_min_test(const ScalarField& u, const Point& x0, const FracParams& params,
                                   const std::vector<double>& eps, WitnessMode mode, const QuadratureSpec& spec = {},
                                   const OptimizerConfig& opt = {});

struct PositivityReport {
  double h = 0.0;
  std::size_t grid_points = 0;
  std::vector<Point> positive;
  std::vector<Point> zero;
  std::vector<Point> minima;  ///< zero points with a positive grid neighbour
};

PositivityReport positivity_set_report(const ScalarField& u, const AxisBox& box, double h);

}  // namespace fraclab
