#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "doctest.h"
#include "fraclab/errors.hpp"
#include "fraclab/linalg.hpp"
#include "fraclab/scene.hpp"

namespace fraclab::test {

/// Kind of the fraclab::Error thrown by fn, or nullopt when nothing is thrown.
inline std::optional<ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

inline CsgSet two_balls() {
  return CsgSet::unite({CsgSet::ball(pt({0, 0, 0}), 1.0), CsgSet::ball(pt({0, 4, 0}), 1.0)});
}

inline CsgSet shell() {
  const Vector e3 = pt({0, 0, 1});
  return CsgSet::intersect({CsgSet::cylinder(pt({0, 0, 0}), e3, std::sqrt(2.0)),
                            CsgSet::complement(CsgSet::cylinder(pt({0, 0, 0}), e3, 1.0))});
}

inline CsgSet unit_ball(int n = 3) { return CsgSet::ball(Point::Zero(n), 1.0); }

inline Point p_eps(double eps) { return pt({0.0, eps, std::sqrt(1.0 - eps * eps)}); }

inline Point uniform_point(std::mt19937_64& rng, const Point& lo, const Point& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) p[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
  return p;
}

}  // namespace fraclab::test
