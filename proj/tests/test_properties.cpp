#include "fraclab/predicates.hpp"
#include "property_suites.hpp"
#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

namespace {

void require_suite(const props::SuiteResult& r) {
  INFO(r.summary());
  CHECK(r.ok());
}

CsgSet random_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CsgSet> parts;
  const int balls = 2 + static_cast<int>(rng() % 2);
  for (int i = 0; i < balls; ++i) parts.push_back(CsgSet::ball(props::random_point(3, rng, 2.0), 0.3 + 0.6 * u(rng)));
  if (rng() % 2) {
    parts.push_back(CsgSet::cylinder(props::random_point(3, rng, 2.0), props::random_point(3, rng, 1.0).normalized(),
                                     0.2 + 0.2 * u(rng)));
  }
  return CsgSet::unite(parts);
}

Point random_outside(const CsgSet& set, std::mt19937_64& rng) {
  for (;;) {
    const Point p = props::random_point(3, rng, 2.5);
    if (!contains(set, p)) return p;
  }
}

}  // namespace

TEST_SUITE("operator properties") {

TEST_CASE("symmetry") { require_suite(props::symmetry_suite()); }
TEST_CASE("scaling") { require_suite(props::scaling_suite()); }
TEST_CASE("rotation equivariance") { require_suite(props::rotation_suite()); }
TEST_CASE("monotonicity") { require_suite(props::monotonicity_suite()); }
TEST_CASE("sandwich") { require_suite(props::sandwich_suite()); }
TEST_CASE("oracle vs optimizer") { require_suite(props::oracle_suite()); }
TEST_CASE("k = 1 coincidence") { require_suite(props::coincidence_suite()); }

}

TEST_SUITE("geometry properties") {

TEST_CASE("line avoidance ignores orientation") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 40; ++i) {
    const CsgSet set = random_scene(rng);
    const Point x = props::random_point(3, rng, 2.5);
    const UnitDirection xi(props::random_point(3, rng, 1.0));
    CHECK(line_avoids(set, x, xi) == line_avoids(set, x, -xi));
  }
}

TEST_CASE("line intervals commute with rigid motions") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 20; ++i) {
    const CsgSet set = random_scene(rng);
    const Matrix r = random_rotation(3, rng());
    const Vector t = props::random_point(3, rng, 3.0);
    const CsgSet moved = rigid_transform(set, r, t);
    const Point x = props::random_point(3, rng, 2.5);
    const Vector xi = props::random_point(3, rng, 1.0).normalized();
    const IntervalList a = line_intersection_intervals(set, x, xi);
    const IntervalList b = line_intersection_intervals(moved, Point(r * x + t), Vector(r * xi));
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(std::abs(a.pieces()[j].lo - b.pieces()[j].lo) <= 1e-9);
      CHECK(std::abs(a.pieces()[j].hi - b.pieces()[j].hi) <= 1e-9);
    }
  }
}

TEST_CASE("distance to the complement is 1-Lipschitz") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const CsgSet set = random_scene(rng);
    const Point p = props::random_point(3, rng, 2.0);
    const Point q = props::random_point(3, rng, 2.0);
    double prev = distance_to_complement(set, p);
    Point last = p;
    for (int j = 1; j <= 50; ++j) {
      const Point y = p + (q - p) * (j / 50.0);
      const double d = distance_to_complement(set, y);
      CHECK(std::abs(d - prev) <= (y - last).norm() + 2e-9);
      prev = d;
      last = y;
    }
  }
}

TEST_CASE("affine avoidance implies line avoidance for every direction in V") {
  std::mt19937_64 rng(24);
  int avoiding = 0;
  for (int i = 0; i < 60; ++i) {
    const CsgSet set = random_scene(rng);
    const Point x = random_outside(set, rng);
    const Subspace v(random_frame(3, 1 + static_cast<int>(rng() % 2), rng()));
    const AffineAvoidance a = decide_affine_avoidance(set, x, v);
    if (a.status != Avoidance::Avoids) continue;
    ++avoiding;
    for (int j = 0; j < 10; ++j) {
      const Vector coeff = props::random_point(v.dim(), rng, 1.0);
      CHECK(line_avoids(set, x, UnitDirection(v.basis().matrix() * coeff)));
    }
  }
  CHECK(avoiding > 5);
}

TEST_CASE("witnesses re-verify and the affine condition implies G") {
  std::mt19937_64 rng(25);
  PredicateSearch search;
  search.opt.restarts = 3;
  for (int i = 0; i < 8; ++i) {
    const CsgSet set = random_scene(rng);
    const Point x = random_outside(set, rng);
    for (int k = 1; k <= 2; ++k) {
      const PredicateVerdict g = check_G(set, CsgSet::everything(3), k, x, search);
      if (g.status == VerdictStatus::Holds) CHECK(frame_avoids(set, x, *g.frame));
      if (g.status == VerdictStatus::Fails) CHECK(g.cells > 0);
      const PredicateVerdict a = check_G_affine(set, k, x, search);
      if (a.status == VerdictStatus::Holds) {
        CHECK(affine_subspace_avoids(set, x, *a.subspace));
        CHECK(frame_avoids(set, x, a.subspace->basis()));
        CHECK(g.status == VerdictStatus::Holds);
      }
      if (a.status == VerdictStatus::Fails && a.certificate) CHECK(contains(set, *a.certificate));
    }
  }
}

TEST_CASE("verdicts are invariant under rigid motions") {
  std::mt19937_64 rng(26);
  PredicateSearch search;
  search.opt.restarts = 3;
  for (int i = 0; i < 5; ++i) {
    const CsgSet set = random_scene(rng);
    const Point x = random_outside(set, rng);
    const Matrix r = random_rotation(3, rng());
    const Vector t = props::random_point(3, rng, 3.0);
    const CsgSet moved = rigid_transform(set, r, t);
    const Point y = r * x + t;
    for (int k = 1; k <= 2; ++k) {
      const PredicateVerdict a = check_G(set, CsgSet::everything(3), k, x, search);
      const PredicateVerdict b = check_G(moved, CsgSet::everything(3), k, y, search);
      CHECK(to_string(a.status) == to_string(b.status));
      if (a.status == VerdictStatus::Holds) {
        const Frame image = Frame::from_orthonormal(r * a.frame->matrix());
        CHECK(frame_avoids(moved, y, image));
      }
      const PredicateVerdict c = check_G_affine(set, k, x, search);
      const PredicateVerdict d = check_G_affine(moved, k, y, search);
      CHECK(to_string(c.status) == to_string(d.status));
    }
  }
}

}
