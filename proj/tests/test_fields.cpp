#include "fraclab/fields.hpp"

#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

TEST_SUITE("fields") {

TEST_CASE("indicator field") {
  const FieldPtr u = indicator_field(unit_ball());
  CHECK(u->value(pt({0, 0, 0})) == 1.0);
  CHECK(u->value(pt({2, 0, 0})) == 0.0);
  CHECK(indicator_field(two_balls())->value(p_eps(0.1)) == 0.0);
  CHECK(u->sup_bound() == 1.0);
  CHECK(u->nonnegative());
  REQUIRE(u->indicator_set() != nullptr);
}

TEST_CASE("distance fields") {
  const FieldPtr d = distance_field(unit_ball());
  CHECK(d->value(pt({0, 0, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_field(two_balls())->value(pt({0, 4, 0.5})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d->value(pt({2, 0, 0})) == 0.0);
  CHECK(d->lipschitz() == 1.0);

  CHECK(error_kind([] { distance_field(CsgSet::half_space(pt({0, 0, 1}), 0.0)); }) == ErrorKind::UnboundedSet);
  const FieldPtr open = distance_field(CsgSet::half_space(pt({0, 0, 1}), 0.0), true);
  CHECK(open->value(pt({0, 0, -3})) == doctest::Approx(3.0));

  const FieldPtr t = truncated_distance_field(unit_ball());
  CHECK(t->value(pt({0, 0, 0})) == doctest::Approx(1.0));
  CHECK(t->value(pt({2, 0, 0})) == 0.0);
  // the shell has inradius (sqrt 2 - 1)/2 < 1, so truncation never bites
  const FieldPtr ts = truncated_distance_field(shell());
  const FieldPtr ds = distance_field(shell(), true);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point p = uniform_point(rng, pt({-2, -2, -5}), pt({2, 2, 5}));
    CHECK(ts->value(p) == doctest::Approx(ds->value(p)).epsilon(1e-12));
    CHECK(ts->value(p) <= (std::sqrt(2.0) - 1.0) / 2.0 + 1e-12);
  }
}

TEST_CASE("gaussian bump") {
  const FieldPtr g = gaussian_bump(pt({0, 0}), 1.0);
  CHECK(g->value(pt({0, 0})) == 1.0);
  CHECK(g->value(pt({30, 0})) <= 1e-300);
  REQUIRE(g->hessian(pt({0, 0})).has_value());
  CHECK((*g->hessian(pt({0, 0})) + 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK(g->sup_bound() >= 1.0);
  // analytic gradient against central differences
  const Point x = pt({0.3, -0.7});
  const Vector grad = *g->gradient(x);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    const Vector e = Vector::Unit(2, i) * h;
    CHECK(grad[i] == doctest::Approx((g->value(x + e) - g->value(x - e)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("getoor profile") {
  const FieldPtr u = getoor_profile(0.5, 2, 0);
  CHECK(u->value(pt({0, 5})) == 1.0);
  CHECK(u->value(pt({1, 0})) == 0.0);
  CHECK(u->value(pt({0.6, 0})) == doctest::Approx(0.8));
}

TEST_CASE("line restrictions") {
  const LineRestriction r = restrict_to_line(*indicator_field(unit_ball()), pt({0, 0, 0}), UnitDirection(pt({1, 1, 1})));
  REQUIRE(r.indicator.has_value());
  REQUIRE(r.indicator->size() == 1);
  CHECK(r.indicator->pieces()[0].lo == doctest::Approx(-1.0));
  CHECK(r.base == 1.0);

  const FieldPtr g = gaussian_bump(pt({0, 0}), 1.0);
  const LineRestriction b = restrict_to_line(*g, pt({0, 0}), UnitDirection::axis(2, 0));
  CHECK_FALSE(b.indicator.has_value());
  CHECK(b.smoothness == Smoothness::C2Near);
  CHECK(b.eval(1.0) == doctest::Approx(std::exp(-1.0)));

  const LineRestriction t = restrict_to_line(*indicator_field(two_balls()), pt({0, 0, 0}), UnitDirection::axis(3, 1));
  REQUIRE(t.indicator.has_value());
  REQUIRE(t.indicator->size() == 2);
  CHECK(t.indicator->pieces()[1].lo == doctest::Approx(3.0));
  CHECK(t.indicator->pieces()[1].hi == doctest::Approx(5.0));
}

TEST_CASE("indicator values match membership and distance positivity matches the set") {
  std::mt19937_64 rng(5);
  const FieldPtr chi = indicator_field(two_balls());
  const FieldPtr d = distance_field(two_balls());
  for (int i = 0; i < 1000; ++i) {
    const Point p = uniform_point(rng, pt({-2, -2, -2}), pt({2, 6, 2}));
    const double c = chi->value(p);
    CHECK((c == 0.0 || c == 1.0));
    CHECK((c == 1.0) == contains(two_balls(), p));
    CHECK((d->value(p) > 0.0) == contains(two_balls(), p));
    CHECK(d->value(p) >= 0.0);
    CHECK(d->value(p) <= d->sup_bound());
  }
}

TEST_CASE("composite fields") {
  const FieldPtr g = gaussian_bump(pt({0, 0}), 1.0);
  const FieldPtr sum = sum_field({2.0, -1.0}, {g, constant_field(2, 0.5)});
  CHECK(sum->value(pt({0, 0})) == doctest::Approx(1.5));
  Matrix m = 2.0 * Matrix::Identity(2, 2);
  const FieldPtr pulled = affine_pullback(g, m, pt({1, 0}));
  CHECK(pulled->value(pt({0, 0})) == doctest::Approx(std::exp(-1.0)));
  CHECK(error_kind([&] { affine_pullback(g, Matrix::Zero(2, 2), pt({0, 0})); }) == ErrorKind::DegenerateInput);
  const FieldPtr p = poly_bump(pt({0, 0}), 2.0);
  CHECK(p->value(pt({0, 0})) == 1.0);
  CHECK(p->value(pt({2, 0})) == 0.0);
  CHECK(p->value(pt({1, 0})) == doctest::Approx(std::pow(0.75, 3)));
}

}
