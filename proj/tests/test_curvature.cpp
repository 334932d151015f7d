#include "fraclab/curvature.hpp"
#include "fraclab/predicates.hpp"

#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

TEST_SUITE("curvature") {

TEST_CASE("paraboloid epigraph has unit curvatures") {
  const ImplicitSurfacePatch patch = paraboloid_patch(pt({0, 0, 0}), 1.0);
  const auto k = principal_curvatures(patch, pt({0, 0, 0}));
  REQUIRE(k.size() == 2);
  CHECK(k[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-6));
  // the same set through its CSG level function
  const auto kc = principal_curvatures(set_patch(CsgSet::paraboloid(pt({0, 0, 0}), 1.0)), pt({0, 0, 0}));
  CHECK(kc[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(kc[1] == doctest::Approx(1.0).epsilon(1e-4));
  for (CurvatureMode m : {CurvatureMode::SumTopK, CurvatureMode::Single})
    CHECK(check_curvature(patch, pt({0, 0, 0}), 1, m).status == VerdictStatus::Holds);
}

TEST_CASE("inner boundary of the shell") {
  const ImplicitSurfacePatch patch = set_patch(shell());
  const auto k = principal_curvatures(patch, pt({1, 0, 0}));
  REQUIRE(k.size() == 2);
  CHECK(k[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(k[1]) <= 1e-6);
  CHECK(check_curvature(patch, pt({1, 0, 0}), 1, CurvatureMode::SumTopK).status == VerdictStatus::Holds);
  CHECK(check_curvature(patch, pt({1, 0, 0}), 1, CurvatureMode::Single).status == VerdictStatus::Holds);
  CHECK(check_curvature(patch, pt({1, 0, 0}), 2, CurvatureMode::SumTopK).status == VerdictStatus::Fails);
}

TEST_CASE("unit ball seen from inside") {
  // U = {x_3 < sqrt(1 - |x'|^2)} near the top: the boundary bends away from U
  const auto k = principal_curvatures(set_patch(unit_ball()), pt({1, 0, 0}));
  CHECK(k[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gates and projection") {
  const ImplicitSurfacePatch patch = set_patch(unit_ball());
  CHECK(error_kind([&] { principal_curvatures(patch, pt({0.5, 0, 0})); }) == ErrorKind::NotOnBoundary);
  const Point q = project_to_boundary(patch, pt({0.9, 0.3, -0.2}));
  CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-10));
  ImplicitSurfacePatch flat;
  flat.dim = 2;
  flat.phi = [](const Point&) { return 0.0; };
  CHECK(error_kind([&] { principal_curvatures(flat, pt({0, 0})); }) == ErrorKind::DegenerateGradient);
}

TEST_CASE("curvature agrees with the line conditions on the paraboloid") {
  const CsgSet u = CsgSet::paraboloid(pt({0, 0, 0}), 1.0);
  const ImplicitSurfacePatch patch = paraboloid_patch(pt({0, 0, 0}), 1.0);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 6; ++i) {
    const Point q = uniform_point(rng, pt({-1, -1, 0}), pt({1, 1, 0}));
    const Point b = pt({q[0], q[1], 0.5 * (q[0] * q[0] + q[1] * q[1])});
    const Vector n = pt({-q[0], -q[1], 1}).normalized();
    const Point outside = b - 0.05 * n;
    for (int k = 1; k <= 2; ++k) {
      REQUIRE(check_G(u, CsgSet::everything(3), k, outside).status == VerdictStatus::Holds);
      CHECK(check_curvature(patch, b, k, CurvatureMode::SumTopK).status == VerdictStatus::Holds);
      REQUIRE(check_G_affine(u, k, outside).status == VerdictStatus::Holds);
      CHECK(check_curvature(patch, b, k, CurvatureMode::Single).status == VerdictStatus::Holds);
    }
  }
}

TEST_CASE("curvature agrees with the conditions at the shell hole") {
  const ImplicitSurfacePatch patch = set_patch(shell());
  const Point hole = pt({0.9, 0, 0});
  CHECK(check_G_affine(shell(), 1, hole).status == VerdictStatus::Holds);
  CHECK(check_curvature(patch, pt({1, 0, 0}), 1, CurvatureMode::Single).status == VerdictStatus::Holds);
  CHECK(check_G_affine(shell(), 2, hole).status == VerdictStatus::Fails);
  CHECK(check_curvature(patch, pt({1, 0, 0}), 2, CurvatureMode::Single).status == VerdictStatus::Fails);
}

}
