#include "fraclab/quadrature.hpp"

#include "support.hpp"

using namespace fraclab;
using namespace fraclab::test;

namespace {

// -(-Delta)^s (1 - x^2)_+^s in one dimension, a constant inside (-1, 1)
double getoor_value(double s) {
  return -std::pow(2.0, 2 * s) * std::tgamma(1 + s) * std::tgamma((1 + 2 * s) / 2) / std::tgamma(0.5);
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("normalization constant") {
  CHECK(normalization_constant(0.5) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
  for (double s = 0.001; s < 0.999; s += 0.01) CHECK(normalization_constant(s) > 0.0);
  CHECK(error_kind([] { normalization_constant(1.5); }) == ErrorKind::OutOfRange);
  CHECK(error_kind([] { normalization_constant(0.0); }) == ErrorKind::OutOfRange);
}

TEST_CASE("gauss-jacobi integrates polynomials against the weight") {
  // int_{-1}^{1} (1+t)^beta dt = 2^{beta+1}/(beta+1)
  const double beta = -0.4;
  const GaussRule r = gauss_jacobi(12, 0.0, beta);
  double sum = 0.0;
  for (double w : r.weights) sum += w;
  CHECK(sum == doctest::Approx(std::pow(2.0, beta + 1) / (beta + 1)).epsilon(1e-13));
  // int (1+t)^beta t^2 dt via the substitution t = 2y - 1
  double m2 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
  const double b1 = beta + 1;
  const double exact = std::pow(2.0, b1) * (4.0 / (b1 + 2) - 4.0 / (b1 + 1) + 1.0 / b1);
  CHECK(m2 == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("tail radius") {
  const double r = tail_radius(1.0, 0.0, 0.5, 1e-6);
  CHECK(r == doctest::Approx(2.0 / (M_PI * 1e-6)).epsilon(1e-10));
  CHECK(tail_radius(1.0, 0.0, 0.5, 2e-6) == doctest::Approx(r / 2).epsilon(1e-10));
  CHECK(tail_radius(1.0, 0.0, 0.8, 1e-6) < r);
}

TEST_CASE("constant fields give zero") {
  const OperatorValue v = eval_directional(*constant_field(3, 2.5), pt({1, 2, 3}), UnitDirection(pt({1, 1, 0})), 0.4);
  CHECK(std::abs(v.value) <= 1e-12);
  CHECK(v.lo <= v.value);
  CHECK(v.value <= v.hi);
}

TEST_CASE("getoor closed form") {
  const FieldPtr u = getoor_profile(0.5, 1);
  const OperatorValue v = eval_directional(*u, pt({0}), UnitDirection::axis(1, 0), 0.5);
  CHECK(getoor_value(0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(v.value + 1.0) <= 1e-3);
  CHECK(v.lo <= -1.0 + 1e-6);
  CHECK(v.hi >= -1.0 - 1e-6);
  for (double s : {0.3, 0.7}) {
    const FieldPtr w = getoor_profile(s, 1);
    for (double x : {0.0, 0.4, -0.75}) {
      const OperatorValue e = eval_directional(*w, pt({x}), UnitDirection::axis(1, 0), s);
      CHECK(e.value == doctest::Approx(getoor_value(s)).epsilon(1e-3));
    }
  }
}

TEST_CASE("indicator pathway integrates exactly") {
  // u(2+t) + u(2-t) = 1 on (1, 3): (1/pi) int_1^3 t^-2 dt = 2 / (3 pi)
  const OperatorValue v = eval_directional(*indicator_field(unit_ball()), pt({2, 0, 0}), UnitDirection::axis(3, 0), 0.5);
  CHECK(v.value == doctest::Approx(2.0 / (3.0 * M_PI)).epsilon(1e-13));
  CHECK(v.width() <= 1e-12);
  const OperatorValue w = eval_directional(*indicator_field(unit_ball()), pt({2, 0, 0}), UnitDirection::axis(3, 1), 0.5);
  CHECK(w.value == 0.0);
  // inside, e1 from the origin: -2 C_s int_1^inf t^{-1-2s} dt = -2 C_s / (2s)
  const double s = 0.3;
  const OperatorValue in = eval_directional(*indicator_field(unit_ball()), pt({0, 0, 0}), UnitDirection::axis(3, 0), s);
  CHECK(in.value == doctest::Approx(-normalization_constant(s) / s).epsilon(1e-13));
}

TEST_CASE("punctured integrals") {
  const FieldPtr zero = constant_field(3, 0.0);
  CHECK(eval_directional_punctured(*zero, pt({0, 0, 0}), UnitDirection::axis(3, 0), 0.5, 0.1).value == 0.0);
  const FieldPtr chi = indicator_field(two_balls());
  CHECK(error_kind([&] { eval_directional_punctured(*chi, pt({0, 0, 0}), UnitDirection::axis(3, 0), 0.5, 0.1); }) ==
        ErrorKind::PreconditionViolated);
  CHECK(eval_directional_punctured(*indicator_field(unit_ball()), pt({2, 0, 0}), UnitDirection::axis(3, 1), 0.5, 0.1)
            .value == 0.0);
  // e1 from (2,0,0) with eps = 0.1 sees (1, 3): same as the unpunctured value
  const double p = eval_directional_punctured(*indicator_field(unit_ball()), pt({2, 0, 0}), UnitDirection::axis(3, 0), 0.5, 0.1)
                       .value;
  CHECK(p == doctest::Approx(2.0 / (3.0 * M_PI)).epsilon(1e-13));
  // eps = 2 cuts to (2, 3): (1/pi)(1/2 - 1/3)
  const double q = eval_directional_punctured(*indicator_field(unit_ball()), pt({2, 0, 0}), UnitDirection::axis(3, 0), 0.5, 2.0)
                       .value;
  CHECK(q == doctest::Approx(1.0 / (6.0 * M_PI)).epsilon(1e-13));
}

TEST_CASE("smooth fields approach the second derivative") {
  const FieldPtr g = gaussian_bump(pt({0}), 1.0);
  double prev = 1e300;
  for (double s : {0.9, 0.95, 0.99}) {
    const double err = std::abs(eval_directional(*g, pt({0}), UnitDirection::axis(1, 0), s).value + 2.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev / 2.0 < 0.1);
}

TEST_CASE("parameter validation") {
  QuadratureSpec bad;
  bad.outer_tol = -1;
  CHECK(error_kind([&] { bad.validate(); }) == ErrorKind::ValidationError);
  FracParams p{0.5, 4, 3};
  CHECK(error_kind([&] { p.validate(); }) == ErrorKind::InvalidDimension);
  FracParams q{1.2, 1, 3};
  CHECK(error_kind([&] { q.validate(); }) == ErrorKind::OutOfRange);
}

}
