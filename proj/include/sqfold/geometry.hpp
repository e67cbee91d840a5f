#pragma once

#include <array>
#include <cstdint>
#include <vector>

// Planar geometry of the folded-square construction: clockwise rotations,
// the fold along the second axis, the angle bookkeeping for a bound
// interval [l,u], knot points on y = x^2, sector angles selected by a
// binary vector, and the tangent/secant triangles that envelope the curve.
namespace sqfold {

struct Vec2 {
  double v = 0.0;
  double w = 0.0;
};

// Minimal/maximal/mid/width angles of (x, (y-1)/2) over the curve segment
// {(x, x^2) : x in [l,u]}. All four live in (-3*pi/2, pi/2].
struct AngleSpan {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double theta_mid = 0.0;
  double theta_d = 0.0;
};

enum class Sense : std::uint8_t { LE, GE, EQ };

// One half-plane a_x*x + a_y*y {<=,>=} rhs.
struct Halfplane {
  double ax = 0.0;
  double ay = 0.0;
  double rhs = 0.0;
  Sense sense = Sense::LE;

  double violation(double x, double y) const {
    const double lhs = ax * x + ay * y;
    switch (sense) {
      case Sense::LE: return lhs - rhs;
      case Sense::GE: return rhs - lhs;
      default: return lhs > rhs ? lhs - rhs : rhs - lhs;
    }
  }
};

// Tangent-tangent-secant triangle around an arc of y = x^2, between the
// knots of two sector boundary angles.
struct Triangle {
  double alpha = 0.0;
  double beta = 0.0;
  std::array<Halfplane, 3> halfplanes;  // [tangent@alpha, tangent@beta, secant]

  bool contains(double x, double y, double tol = 1e-10) const;
};

// Binary sector selector of length nu; s counts the zeros.
struct SectorIndex {
  std::vector<int> z;

  int s() const {
    int cnt = 0;
    for (int zj : z) cnt += 1 - zj;
    return cnt;
  }
};

// Clockwise rotation by theta: [cos*v + sin*w, -sin*v + cos*w].
Vec2 rot(const Vec2& p, double theta);

// Fold along the second dimension: [v, |w|].
Vec2 fold(const Vec2& p);

// Radian angle of a nonzero vector, represented in (-3*pi/2, pi/2].
// Throws std::invalid_argument on the zero vector.
double arc_tan(const Vec2& p);

// Angle span of the bound interval [l,u]; requires l <= u.
AngleSpan angle_span(double l, double u);

// x-coordinate of the knot where the ray at angle `alpha` meets the curve
// (x, (x^2-1)/2). Requires alpha in (-3*pi/2, pi/2); alpha = -pi/2 maps to 0.
double knot(double alpha);

// Sector boundary angles (phi, beta) selected by z over the span's knot
// grid {theta_min + k * theta_d / 2^nu}.
struct SectorAngles {
  double phi = 0.0;
  double beta = 0.0;
};
SectorAngles sector_angles(const SectorIndex& z, const AngleSpan& span);

// The triangle formed by the tangents at the knots of alpha and beta and
// the secant through them. Requires alpha != beta (tolerance 1e-12).
Triangle triangle(double alpha, double beta);

// Membership in the companion convex region: below the secant through the
// two knots and above the curve y = x^2.
bool member_plus(double x, double y, double alpha, double beta,
                 double tol = 1e-10);

// Worst-case approximation gaps at refinement level nu >= 2:
//   sqrt_gap  bounds | sqrt(y) - |x| |,
//   square_gap bounds | y - x^2 |.
struct ErrorBounds {
  double sqrt_gap = 0.0;
  double square_gap = 0.0;
};
ErrorBounds error_bounds(double l, double u, int nu);

}  // namespace sqfold
