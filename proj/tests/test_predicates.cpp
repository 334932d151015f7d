#include "fraclab/predicates.hpp"

#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

TEST_SUITE("predicates") {

TEST_CASE("G holds between the balls") {
  const CsgSet everything = CsgSet::everything(3);
  const PredicateVerdict v = check_G(two_balls(), everything, 2, pt({0, 2, 0}));
  REQUIRE(v.status == VerdictStatus::Holds);
  REQUIRE(v.frame.has_value());
  CHECK(frame_avoids(two_balls(), pt({0, 2, 0}), *v.frame));
  // the witness lines stay in the plane y = 2
  CHECK(v.frame->matrix().row(1).norm() <= 1e-12);
}

TEST_CASE("G with k = N outside a single ball") {
  const PredicateVerdict v = check_G(unit_ball(), CsgSet::everything(3), 3, pt({2, 0, 0}));
  REQUIRE(v.status == VerdictStatus::Holds);
  CHECK(frame_avoids(unit_ball(), pt({2, 0, 0}), *v.frame));
}

TEST_CASE("G gates") {
  CHECK(error_kind([] { check_G(two_balls(), CsgSet::everything(3), 2, pt({0, 0, 0})); }) == ErrorKind::PointInsideU);
  CHECK(error_kind([] { check_G(two_balls(), unit_ball(), 2, pt({0, 2, 0})); }) == ErrorKind::PointOutsideOmega);
  CHECK(error_kind([] { check_G(two_balls(), CsgSet::everything(3), 4, pt({0, 2, 0})); }) ==
        ErrorKind::InvalidDimension);
}

TEST_CASE("G fails inside the shell hole for k = 2") {
  const PredicateVerdict v = check_G(shell(), CsgSet::everything(3), 2, pt({0, 0, 0}));
  CHECK(v.status == VerdictStatus::Fails);
  CHECK(v.cells > 0);
  const PredicateVerdict one = check_G(shell(), CsgSet::everything(3), 1, pt({0, 0, 0}));
  REQUIRE(one.status == VerdictStatus::Holds);
  CHECK(line_angle(one.frame->matrix().col(0), pt({0, 0, 1})) <= 1e-9);
}

TEST_CASE("affine condition at P_eps reproduces the tangent-plane certificate") {
  const double eps = 0.1;
  const Point p = p_eps(eps);
  const PredicateVerdict v = check_G_affine(two_balls(), 2, p);
  REQUIRE(v.status == VerdictStatus::Fails);
  REQUIRE(v.certificate.has_value());
  const double r = std::sqrt(1 - eps * eps);
  const Point paper = pt({0, 4, r - eps / r * (4 - eps)});
  CHECK((*v.certificate - paper).norm() <= 1e-6);
  CHECK(contains(CsgSet::ball(pt({0, 4, 0}), 1.0), *v.certificate));
}

TEST_CASE("affine condition on the shell") {
  const PredicateVerdict one = check_G_affine(shell(), 1, pt({0, 0, 0}));
  REQUIRE(one.status == VerdictStatus::Holds);
  REQUIRE(one.subspace.has_value());
  CHECK(affine_subspace_avoids(shell(), pt({0, 0, 0}), *one.subspace));
  const PredicateVerdict two = check_G_affine(shell(), 2, pt({0, 0, 0}));
  CHECK(two.status == VerdictStatus::Fails);
  CHECK(two.resolution == doctest::Approx(2.0));
}

TEST_CASE("affine condition holds for planes beside a ball") {
  const PredicateVerdict v = check_G_affine(unit_ball(), 2, pt({1.5, 0.5, -0.2}));
  REQUIRE(v.status == VerdictStatus::Holds);
  CHECK(affine_subspace_avoids(unit_ball(), pt({1.5, 0.5, -0.2}), *v.subspace));
}

TEST_CASE("higher dimensions are inconclusive rather than refuted") {
  const CsgSet b4 = CsgSet::ball(Point::Zero(4), 1.0);
  // every line through the centre of a 4-ball meets it, yet no refutation is claimed in N = 4
  const PredicateVerdict v = check_G(CsgSet::complement(b4), CsgSet::everything(4), 1, Point::Zero(4));
  CHECK(v.status != VerdictStatus::Holds);
  CHECK(v.status == VerdictStatus::Inconclusive);
}

TEST_CASE("convex components") {
  AxisBox box{pt({-1.5, -1.5, -1.5}), pt({1.5, 1.5, 1.5})};
  CHECK(check_convex_components(unit_ball(), box, 0.1, 16).status == VerdictStatus::Holds);
  AxisBox two{pt({-1.5, -1.5, -1.5}), pt({1.5, 5.5, 1.5})};
  CHECK(check_convex_components(two_balls(), two, 0.1, 16).status == VerdictStatus::Holds);
  AxisBox shell_box{pt({-1.5, -1.5, -1}), pt({1.5, 1.5, 1})};
  const PredicateVerdict v = check_convex_components(shell(), shell_box, 0.05, 32);
  REQUIRE(v.status == VerdictStatus::Fails);
  REQUIRE(v.certificate.has_value());
  CHECK_FALSE(contains(shell(), *v.certificate));
}

}
