#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

TEST_SUITE("scene") {

TEST_CASE("membership is strict") {
  CHECK(contains(unit_ball(), pt({0, 0, 0})));
  CHECK_FALSE(contains(unit_ball(), pt({1, 0, 0})));
  CHECK_FALSE(contains(two_balls(), p_eps(0.1)));
  CHECK(contains(shell(), pt({1.2, 0, 7})));
  CHECK_FALSE(contains(shell(), pt({0, 0, 0})));
  CHECK(error_kind([] { contains(unit_ball(), pt({0, 0})); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("line intersection intervals") {
  const auto iv = line_intersection_intervals(unit_ball(), pt({0, 0, 0}), UnitDirection(pt({1, 2, -2})));
  REQUIRE(iv.size() == 1);
  CHECK(iv.pieces()[0].lo == doctest::Approx(-1.0));
  CHECK(iv.pieces()[0].hi == doctest::Approx(1.0));

  CHECK(line_intersection_intervals(unit_ball(), pt({2, 0, 0}), UnitDirection::axis(3, 1)).empty());

  // distance from the line {x = y, z = 0} to (0,4,0) is 2 sqrt 2 > 1
  const auto diag = line_intersection_intervals(two_balls(), pt({0, 0, 0}), UnitDirection(pt({1, 1, 0})));
  REQUIRE(diag.size() == 1);
  CHECK(diag.pieces()[0].lo == doctest::Approx(-1.0));
  CHECK(diag.pieces()[0].hi == doctest::Approx(1.0));

  const auto axis = line_intersection_intervals(two_balls(), pt({0, 0, 0}), UnitDirection::axis(3, 1));
  REQUIRE(axis.size() == 2);
  CHECK(axis.pieces()[1].lo == doctest::Approx(3.0));
  CHECK(axis.pieces()[1].hi == doctest::Approx(5.0));
}

TEST_CASE("line avoidance") {
  CHECK(line_avoids(two_balls(), pt({0, 2, 0}), UnitDirection::axis(3, 0)));
  for (int i = 0; i < 10; ++i)
    CHECK_FALSE(line_avoids(unit_ball(), pt({0, 0, 0}), UnitDirection(random_frame(3, 1, i).matrix().col(0))));
  CHECK(line_avoids(shell(), pt({1.5, 0, 0}), UnitDirection::axis(3, 2)));
}

TEST_CASE("affine subspace avoidance") {
  Matrix yz(3, 2);
  yz << 0, 0, 1, 0, 0, 1;
  CHECK(affine_subspace_avoids(unit_ball(), pt({2, 0, 0}), Subspace::span(yz)));

  // tangent plane of the first ball at P_0.1 meets the second ball at the paper's point
  const Point p = p_eps(0.1);
  const Frame tangent = Frame::from_orthonormal(complement_basis(p));
  const Subspace plane(tangent);
  CHECK_FALSE(affine_subspace_avoids(two_balls(), p, plane));
  const auto hit = find_affine_hit(two_balls(), p, plane);
  REQUIRE(hit.has_value());
  CHECK(contains(two_balls(), *hit));
  CHECK(std::abs((*hit - p).dot(p)) <= 1e-9);

  for (std::uint64_t seed = 0; seed < 10; ++seed)
    CHECK_FALSE(affine_subspace_avoids(shell(), pt({0, 0, 0}), Subspace(random_frame(3, 2, seed))));
}

TEST_CASE("affine avoidance against a paraboloid") {
  const CsgSet par = CsgSet::paraboloid(pt({0, 0, 0}), 1.0);
  Matrix horizontal = Matrix::Identity(3, 2);
  CHECK(affine_subspace_avoids(par, pt({0, 0, -0.1}), Subspace::span(horizontal)));
  // the tangent plane at the apex sits inside the certification margin
  CHECK(error_kind([&] { affine_subspace_avoids(par, pt({0, 0, 0}), Subspace::span(horizontal)); }) ==
        ErrorKind::UndecidablePrimitive);
  Matrix tilted(3, 2);
  tilted << 1, 0, 0, 1, 0.3, 0;
  const auto meet = decide_affine_avoidance(par, pt({0, 0, -0.01}), Subspace::span(tilted));
  CHECK(meet.status == Avoidance::Meets);
  REQUIRE(meet.hit.has_value());
  CHECK(contains(par, *meet.hit));
  Matrix vertical(3, 1);
  vertical << 0, 0, 1;
  CHECK_FALSE(affine_subspace_avoids(par, pt({5, 0, -100}), Subspace::span(vertical)));
  // a line below the tangent plane of (1, 0, 1/2)
  Matrix line(3, 1);
  line << 1, 0, 1;
  CHECK(affine_subspace_avoids(par, pt({1, 0, 0.45}), Subspace::span(line)));
  CHECK(line_avoids(par, pt({1, 0, 0.45}), UnitDirection(pt({1, 0, 1}))));
}

TEST_CASE("distance to the complement") {
  CHECK(distance_to_complement(unit_ball(), pt({0, 0, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_to_complement(unit_ball(), pt({0.5, 0, 0})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(distance_to_complement(two_balls(), pt({0, 4, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_to_complement(two_balls(), pt({0, 2, 0})) == 0.0);
  const auto b = distance_bracket(shell(), pt({1.2, 0.1, 3}));
  CHECK(b.hi - b.lo <= 1e-9);
  const double r = std::hypot(1.2, 0.1);
  CHECK(b.hi == doctest::Approx(std::min(r - 1.0, std::sqrt(2.0) - r)).epsilon(1e-9));
}

TEST_CASE("interval list algebra") {
  const IntervalList a = IntervalList::from({{0, 2}, {1, 3}, {5, 5}, {6, 7}});
  REQUIRE(a.size() == 2);
  CHECK(a.pieces()[0].hi == 3);
  const IntervalList b = a.intersect(IntervalList::single(2, 6.5));
  CHECK(b.measure(100) == doctest::Approx(1.5));
  CHECK(a.mirrored().contains(-6.5));
  CHECK(IntervalList::whole_line().measure(10) == doctest::Approx(20));
  CHECK_FALSE(a.contains(3.0));
}

TEST_CASE("grid components and convexity") {
  AxisBox wide{pt({-2, -2, -2}), pt({2, 6, 2})};
  CHECK(connected_components(two_balls(), wide, 0.1).size() == 2);
  CHECK(connected_components(unit_ball(), AxisBox{pt({-2, -2, -2}), pt({2, 2, 2})}, 0.1).size() == 1);
  const auto shell_parts = connected_components(shell(), AxisBox{pt({-2, -2, -2}), pt({2, 2, 2})}, 0.05);
  CHECK(shell_parts.size() == 1);

  for (const auto& c : connected_components(two_balls(), wide, 0.1))
    CHECK(is_component_convex(c, two_balls(), 16).status == VerdictStatus::Holds);

  Component pair;
  pair.points = {pt({1.2, 0, 0}), pt({-1.2, 0, 0})};
  pair.indices = {{24, 0, 0}, {-24, 0, 0}};
  const PredicateVerdict v = is_component_convex(pair, shell(), 32);
  CHECK(v.status == VerdictStatus::Fails);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->norm() <= 1e-15);

}

}
