#include <stdexcept>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "sqfold/geometry.hpp"

using namespace sqfold;

namespace {

constexpr double kPi = 3.14159265358979323846;

double norm(const Vec2& p) { return std::hypot(p.v, p.w); }

// Distance from `a` to the interval [lo, hi] modulo 2*pi.
double mod_interval_dist(double a, double lo, double hi) {
  const double width = hi - lo;
  double t = std::fmod(a - lo, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  if (t <= width) return 0.0;
  return std::min(t - width, 2.0 * kPi - t);
}

}  // namespace

TEST_CASE("rot matches the clockwise convention") {
  Vec2 r = rot({1, 0}, kPi / 2);
  CHECK(r.v == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.w == doctest::Approx(-1.0));
  r = rot({0, 1}, kPi / 2);
  CHECK(r.v == doctest::Approx(1.0));
  CHECK(r.w == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(norm(rot({3, 4}, 0.7)) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("fold takes the absolute value of the second coordinate") {
  CHECK(fold({3, -4}).w == 4.0);
  CHECK(fold({3, -4}).v == 3.0);
  CHECK(fold({3, 4}).w == 4.0);
  CHECK(fold({0, 0}).v == 0.0);
  CHECK(fold({0, 0}).w == 0.0);
}

TEST_CASE("arc_tan representative") {
  CHECK(arc_tan({1, 0}) == doctest::Approx(0.0));
  CHECK(arc_tan({0, 1}) == doctest::Approx(kPi / 2));
  CHECK(arc_tan({-1, 0}) == doctest::Approx(-kPi));
  CHECK(arc_tan({0, -1}) == doctest::Approx(-kPi / 2));
  CHECK_THROWS_AS(arc_tan({0, 0}), std::invalid_argument);
  // representative stays in (-3*pi/2, pi/2] and points along p
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    Vec2 p{d(rng), d(rng)};
    if (p.v == 0 && p.w == 0) continue;
    const double a = arc_tan(p);
    CHECK(a > -1.5 * kPi);
    CHECK(a <= kPi / 2);
    CHECK(std::fabs(std::cos(a) * p.w - std::sin(a) * p.v) <= 1e-9 * norm(p));
  }
}

TEST_CASE("angle_span three-case formula") {
  AngleSpan s = angle_span(0, 1);
  CHECK(s.theta_min == doctest::Approx(-kPi / 2));
  CHECK(s.theta_max == doctest::Approx(0.0).epsilon(1e-12));

  s = angle_span(-1, 1);
  CHECK(s.theta_min == doctest::Approx(-kPi));
  CHECK(s.theta_max == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.theta_mid == doctest::Approx(-kPi / 2));
  CHECK(s.theta_d == doctest::Approx(kPi));

  s = angle_span(2, 3);
  CHECK(s.theta_min == doctest::Approx(std::atan(0.75)).epsilon(1e-12));
  CHECK(s.theta_max == doctest::Approx(std::atan(4.0 / 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(angle_span(1, 0), std::invalid_argument);
}

TEST_CASE("knot values and ray round trip") {
  CHECK(knot(0) == doctest::Approx(1.0));
  CHECK(knot(-kPi / 2) == 0.0);
  CHECK(knot(-0.75 * kPi) ==
        doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(knot(kPi / 2), std::invalid_argument);
  CHECK_THROWS_AS(knot(-1.5 * kPi), std::invalid_argument);

  // The ray at angle a meets (x, (x^2-1)/2) exactly at x = knot(a).
  for (int i = 1; i < 10000; ++i) {
    const double a = -1.5 * kPi + 2.0 * kPi * i / 10000.0;
    if (a >= kPi / 2) break;
    const double x = knot(a);
    const Vec2 p{x, 0.5 * (x * x - 1.0)};
    if (p.v == 0 && p.w == 0) continue;
    CHECK(mod_interval_dist(arc_tan(p), a, a) <= 1e-9);
  }
}

TEST_CASE("sector_angles over [-1,1]") {
  const AngleSpan span = angle_span(-1, 1);
  SectorAngles sa = sector_angles(SectorIndex{{1}}, span);
  CHECK(sa.phi == doctest::Approx(-kPi / 2));
  CHECK(sa.beta == doctest::Approx(0.0).epsilon(1e-12));

  sa = sector_angles(SectorIndex{{0}}, span);
  CHECK(sa.phi == doctest::Approx(-kPi / 2));
  CHECK(sa.beta == doctest::Approx(-kPi));

  // all-ones z telescopes to beta = theta_max
  for (int nu = 1; nu <= 8; ++nu) {
    SectorIndex z{std::vector<int>(nu, 1)};
    CHECK(z.s() == 0);
    sa = sector_angles(z, span);
    CHECK(std::fabs(sa.beta - span.theta_max) <= 1e-12);
  }
}

TEST_CASE("sector cover: every adjacent knot-angle pair exactly once") {
  for (auto [l, u] : std::vector<std::pair<double, double>>{
           {-1, 1}, {0, 3}, {-2, -0.5}}) {
    const AngleSpan span = angle_span(l, u);
    for (int nu = 1; nu <= 6; ++nu) {
      const double step = span.theta_d / std::ldexp(1.0, nu);
      std::map<int, int> seen;  // lower grid index -> count
      for (int k = 0; k < (1 << nu); ++k) {
        std::vector<int> z(nu);
        for (int j = 0; j < nu; ++j) z[j] = (k >> j) & 1;
        const SectorAngles sa = sector_angles(SectorIndex{z}, span);
        const double lo = std::min(sa.phi, sa.beta);
        const double hi = std::max(sa.phi, sa.beta);
        const double fidx = (lo - span.theta_min) / step;
        const long idx = std::lround(fidx);
        REQUIRE(std::fabs(fidx - idx) <= 1e-8);
        REQUIRE(hi - lo == doctest::Approx(step).epsilon(1e-10));
        seen[static_cast<int>(idx)]++;
      }
      REQUIRE(static_cast<int>(seen.size()) == (1 << nu));
      for (auto [idx, count] : seen) {
        CHECK(count == 1);
        CHECK(idx >= 0);
        CHECK(idx < (1 << nu));
      }
    }
  }
}

TEST_CASE("triangle rows for the right half of [-1,1]") {
  const Triangle t = triangle(-kPi / 2, 0.0);
  // Equivalent to {y >= 0, y >= 2x - 1, y <= x}; probe both descriptions.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = d(rng), y = d(rng);
    const bool direct = y >= -1e-12 && y >= 2 * x - 1 - 1e-12 && y <= x + 1e-12;
    CHECK(t.contains(x, y, 1e-9) == direct);
  }
  CHECK(t.contains(0.5, 0.25));
  CHECK_FALSE(t.contains(0.5, 0.6));
  CHECK_THROWS_AS(triangle(0.3, 0.3), std::invalid_argument);
}

TEST_CASE("triangle knots satisfy all three rows") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> d(-1.4 * kPi, 0.45 * kPi);
  for (int i = 0; i < 500; ++i) {
    const double a = d(rng), b = d(rng);
    if (std::fabs(a - b) < 1e-3) continue;
    const Triangle t = triangle(a, b);
    for (double ang : {a, b}) {
      const double x = knot(ang);
      for (const Halfplane& h : t.halfplanes)
        CHECK(h.violation(x, x * x) <= 1e-9);
    }
  }
}

TEST_CASE("member_plus") {
  CHECK(member_plus(0.5, 0.25, -kPi / 2, 0.0));
  CHECK(member_plus(0.5, 0.5, -kPi / 2, 0.0));
  CHECK_FALSE(member_plus(0.5, 0.20, -kPi / 2, 0.0));
}

TEST_CASE("error_bounds formulas") {
  CHECK(error_bounds(-1, 1, 2).square_gap == doctest::Approx(1.0));
  CHECK(error_bounds(-1, 1, 5).square_gap == doctest::Approx(4.0 / 256.0));
  CHECK(error_bounds(0, 2, 3).sqrt_gap == doctest::Approx(1.25));
  CHECK_THROWS_AS(error_bounds(-1, 1, 1), std::invalid_argument);
}

TEST_CASE("norm invariance of rot and fold") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{d(rng), d(rng)};
    const double theta = d(rng);
    CHECK(norm(rot(p, theta)) == doctest::Approx(norm(p)).epsilon(1e-12));
    CHECK(norm(fold(p)) == doctest::Approx(norm(p)).epsilon(1e-12));
  }
}

TEST_CASE("angle reduction by mid rotation and fold") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> base(-2.0 * kPi, 2.0 * kPi);
  std::uniform_real_distribution<double> width(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double t1 = base(rng);
    const double td = width(rng);
    const double t2 = t1 + td;
    const double ang = t1 + unit(rng) * td;
    const double r = radius(rng);
    const Vec2 p{r * std::cos(ang), r * std::sin(ang)};
    CHECK(mod_interval_dist(arc_tan(p), t1, t2) <= 1e-10);
    const Vec2 q = fold(rot(p, 0.5 * (t1 + t2)));
    CHECK(mod_interval_dist(arc_tan(q), 0.0, 0.5 * td) <= 1e-10);
  }
}

TEST_CASE("secant/tangent trig identities") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> d(-1.5 * kPi, 0.5 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng), b = d(rng);
    const double mid = 0.5 * (a + b), half = 0.5 * (a - b);
    const double factor = 0.5 * (std::cos(half) - std::sin(mid));
    const double lhs1 =
        ((std::sin(a) + 1) / std::cos(a) + (std::sin(b) + 1) / std::cos(b)) *
        factor;
    CHECK(std::fabs(lhs1 - std::cos(mid)) <= 1e-10);
    const double lhs2 = (std::sin(a) + 1) * (std::sin(b) + 1) /
                        (std::cos(a) * std::cos(b)) * factor;
    CHECK(std::fabs(lhs2 - 0.5 * (std::sin(mid) + std::cos(half))) <= 1e-10);
  }
}

TEST_CASE("curve containment in sector triangles") {
  for (auto [l, u] : std::vector<std::pair<double, double>>{
           {-1, 1}, {0, 3}, {-2, -0.5}}) {
    const AngleSpan span = angle_span(l, u);
    for (int nu = 1; nu <= 4; ++nu) {
      for (int k = 0; k < (1 << nu); ++k) {
        std::vector<int> z(nu);
        for (int j = 0; j < nu; ++j) z[j] = (k >> j) & 1;
        const SectorAngles sa = sector_angles(SectorIndex{z}, span);
        const Triangle t = triangle(sa.phi, sa.beta);
        const double xa = knot(sa.phi), xb = knot(sa.beta);
        for (int i = 0; i <= 100; ++i) {
          const double x = xa + (xb - xa) * i / 100.0;
          CHECK(t.contains(x, x * x, 1e-9));
          CHECK(member_plus(x, x * x, sa.phi, sa.beta, 1e-9));
        }
      }
    }
  }
}
