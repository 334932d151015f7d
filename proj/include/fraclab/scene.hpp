#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fraclab/linalg.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Open sets built from primitives.
//
// Every primitive is an open set {f < 0} with f its exact signed distance.
// Complement(A) denotes the interior of R^N \ A, i.e. the open set {f > 0}
// for a primitive; complements are pushed to the leaves by De Morgan, so all
// sets stay open.
// ---------------------------------------------------------------------------

struct Ball {
  Point center;
  double radius;
};

struct Box {
  Point lo;
  Point hi;
};

/// {y : <normal, y> < offset}, normal of unit length.
struct HalfSpace {
  Vector normal;
  double offset;
};

/// Infinite cylinder {y : |P_{axis-perp}(y - point)| < radius}.
struct Cylinder {
  Point point;
  Vector axis;
  double radius;
};

/// Epigraph {y : y_N > apex_N + curvature/2 * |y' - apex'|^2} opening along the last axis.
struct Paraboloid {
  Point apex;
  double curvature;
};

class CsgSet {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  static CsgSet ball(Point center, double radius);
  static CsgSet box(Point lo, Point hi);
  static CsgSet half_space(Vector normal, double offset);
  static CsgSet cylinder(Point point, Vector axis, double radius);
  static CsgSet paraboloid(Point apex, double curvature);
  static CsgSet everything(int n);
  static CsgSet nothing(int n);
  static CsgSet unite(std::vector<CsgSet> children);
  static CsgSet intersect(std::vector<CsgSet> children);
  static CsgSet complement(CsgSet child);

  int dim() const;
  const Node& node() const { return *node_; }
  /// Compact human-readable description, stable across runs.
  std::string describe() const;

 private:
  explicit CsgSet(NodePtr node) : node_(std::move(node)) {}
  NodePtr node_;
};

struct CsgSet::Node {
  struct Union { std::vector<CsgSet> children; };
  struct Intersection { std::vector<CsgSet> children; };
  struct Complement { CsgSet child; };
  struct Everything {};
  struct Nothing {};
  using Kind = std::variant<Ball, Box, HalfSpace, Cylinder, Paraboloid, Union, Intersection, Complement,
                            Everything, Nothing>;
  int dim;
  Kind kind;
};

// ---------------------------------------------------------------------------
// Interval lists: {tau : x + tau xi in set}
// ---------------------------------------------------------------------------

struct Interval {
  double lo;
  double hi;
};

/// Sorted, pairwise disjoint open intervals; ends may be infinite.
class IntervalList {
 public:
  IntervalList() = default;
  static IntervalList whole_line();
  static IntervalList single(double lo, double hi);
  /// Normalizes arbitrary open intervals (drops empty ones, merges overlaps).
  static IntervalList from(std::vector<Interval> pieces);

  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  std::size_t size() const { return pieces_.size(); }
  bool contains(double t) const;

  IntervalList unite(const IntervalList& other) const;
  IntervalList intersect(const IntervalList& other) const;
  /// tau -> -tau.
  IntervalList mirrored() const;
  /// Total length of the part inside [-cap, cap].
  double measure(double cap) const;

 private:
  std::vector<Interval> pieces_;
};

bool contains(const CsgSet& set, const Point& p);

IntervalList line_intersection_intervals(const CsgSet& set, const Point& x, const Vector& direction);
inline IntervalList line_intersection_intervals(const CsgSet& set, const Point& x, const UnitDirection& xi) {
  return line_intersection_intervals(set, x, xi.coords());
}

bool line_avoids(const CsgSet& set, const Point& x, const UnitDirection& xi);

enum class Avoidance { Avoids, Meets, Unknown };

struct AffineAvoidance {
  Avoidance status;
  std::optional<Point> hit;  ///< a point of (x+V) inside the set, when status == Meets and one is known
};

/// Three-valued decision of (x + V) n set == empty, with exact rules for balls, half-spaces and
/// cylinders and a certified-margin convex test for boxes.
AffineAvoidance decide_affine_avoidance(const CsgSet& set, const Point& x, const Subspace& v);

/// True iff (x + V) does not meet the set. Throws UndecidablePrimitive when no rule certifies.
bool affine_subspace_avoids(const CsgSet& set, const Point& x, const Subspace& v);

/// A point of (x + V) inside the set, found through deterministic candidate constructions
/// (vertical then orthogonal projections of primitive centers, then in-plane line sweeps).
std::optional<Point> find_affine_hit(const CsgSet& set, const Point& x, const Subspace& v);

struct DistanceBracket {
  double lo;
  double hi;
  Point nearest;  ///< a point of the complement at distance hi (x itself when x is outside)
};

/// dist(x, R^N \ set) bracketed from below by the min/max recursion and from above by exact
/// ray exits; hi - lo <= 1e-9 on the scenes where the recursion is tight.
DistanceBracket distance_bracket(const CsgSet& set, const Point& x);
double distance_to_complement(const CsgSet& set, const Point& x);
/// Certified lower bound of dist(x, R^N \ set) (cheap; no ray refinement).
double depth_lower_bound(const CsgSet& set, const Point& x);
/// Certified lower bound of dist(x, set) for x outside the set.
double exterior_distance_lower_bound(const CsgSet& set, const Point& x);
/// Radius around x inside which the recursion distance is C^2 (active branch fixed, away from
/// medial-axis kinks of each primitive). Zero when x sits on a kink.
double distance_smooth_radius(const CsgSet& set, const Point& x);

struct AxisBox {
  Point lo;
  Point hi;
};

/// Box containing the set; coordinates may be infinite, and lo > hi on some axis means empty.
AxisBox extent_box(const CsgSet& set);
/// Finite box containing the set, or nullopt when the extent box is unbounded.
std::optional<AxisBox> bounding_box(const CsgSet& set);
bool is_bounded(const CsgSet& set);

/// Primitive leaves reachable in the tree, with the parity of complements above them.
struct LeafRef {
  const CsgSet::Node* node;
  bool negated;
};
std::vector<LeafRef> leaves(const CsgSet& set);

/// Image of the set under y -> r*y + t for a rotation r. Boxes and paraboloids only admit r = I.
CsgSet rigid_transform(const CsgSet& set, const Matrix& r, const Vector& t);

// ---------------------------------------------------------------------------
// Verdicts and grid components
// ---------------------------------------------------------------------------

enum class VerdictStatus { Holds, Fails, Inconclusive };
std::string to_string(VerdictStatus status);

struct PredicateVerdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  std::optional<Frame> frame;        ///< witness for line conditions
  std::optional<Subspace> subspace;  ///< witness for subspace conditions
  std::optional<Point> certificate;  ///< point demonstrating failure
  double resolution = 0.0;           ///< grid resolution the verdict refers to
  int cells = 0;                     ///< covering cells certified (refutations)
  std::string detail;
};

struct Component {
  std::vector<Point> points;
  std::vector<std::vector<int>> indices;
};

/// Face-neighbour flood fill of the grid points of `box` (spacing h) lying in the set.
std::vector<Component> connected_components(const CsgSet& set, const AxisBox& box, double h);

/// Segment test on sampled pairs of component points; m samples per segment plus the midpoint.
PredicateVerdict is_component_convex(const Component& component, const CsgSet& set, int m);

}  // namespace fraclab
